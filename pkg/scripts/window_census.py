"""Tabulate root counts per delta-level in a window slice, split into
ordinary and doubled roots.

Usage: python scripts/window_census.py CONFIG.json [--window M,N]
       python scripts/window_census.py --type "D3(2)" --g a0=2Z+1
"""
import argparse
import json
from collections import Counter

from erskit.base_system import config_from_dict, simple_config
from erskit.roots import RootWindow, generate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", help="QEBS config file (JSON)")
    ap.add_argument("--type", dest="tname", help="family name, e.g. D3(2)")
    ap.add_argument("--g", action="append", default=[],
                    help="doubling entry node=tag, e.g. a0=2Z+1")
    ap.add_argument("--window", default="6,6")
    ap.add_argument("--pad", type=int, default=2)
    args = ap.parse_args()

    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = config_from_dict(json.load(fh))
    elif args.tname:
        g = {}
        for item in args.g:
            node, tag = item.split("=")
            g[int(node.lstrip("a"))] = tag
        cfg = simple_config(args.tname, g=g)
    else:
        ap.error("give a config file or --type")

    m, n = (int(x) for x in args.window.split(","))
    rs = generate(cfg, RootWindow(m, n, args.pad))

    plain = Counter()
    doubled = Counter()
    for coords, ann in rs.sorted_roots():
        lvl = rs.level(coords)
        (doubled if ann["doubled"] else plain)[lvl] += 1

    print(f"{'level':>6} {'plain':>6} {'doubled':>8}")
    for lvl in sorted(set(plain) | set(doubled)):
        print(f"{str(lvl):>6} {plain[lvl]:>6} {doubled[lvl]:>8}")
    print(f"total {len(rs.inner)} roots, "
          f"{sum(doubled.values())} doubled")


if __name__ == "__main__":
    main()
