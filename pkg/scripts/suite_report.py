"""Sweep the minimal-rank suite: window closure, unfolded datum, and the
loop realization, one line per family.

Usage: python scripts/suite_report.py [--window M,N] [--skip-pi]
"""
import argparse
import time

from erskit.base_system import simple_config
from erskit.roots import RootWindow, check_ebs, generate
from erskit.unfold import build_handy, k_vee, verify_pi

FAMILIES = [
    "A2(1)", "B3(1)", "C2(1)", "D4(1)", "E6(1)", "E7(1)", "E8(1)",
    "F4(1)", "G2(1)", "A4(2)", "A5(2)", "D3(2)", "E6(2)", "D4(3)",
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--window", default="6,6")
    ap.add_argument("--pad", type=int, default=2)
    ap.add_argument("--skip-pi", action="store_true",
                    help="skip the relation substitution pass")
    args = ap.parse_args()
    m, n = (int(x) for x in args.window.split(","))
    win = RootWindow(m, n, args.pad)

    print(f"{'family':8} {'roots':>6} {'ebs':>5} {'|I|':>4} "
          f"{'pi':>5} {'kappa':>8} {'sec':>7}")
    for name in FAMILIES:
        t0 = time.monotonic()
        cfg = simple_config(name)
        rs = generate(cfg, win)
        ebs = "pass" if check_ebs(rs).passed else "FAIL"
        hd = build_handy(cfg)
        assert hd.n == sum(k_vee(cfg).values())
        if args.skip_pi:
            pi, kappa = "-", "-"
        else:
            rep, _ = verify_pi(cfg)
            pi = "pass" if rep.passed else "FAIL"
            kappa = str(rep.kappa)
        dt = time.monotonic() - t0
        print(f"{name:8} {len(rs.inner):>6} {ebs:>5} {hd.n:>4} "
              f"{pi:>5} {kappa:>8} {dt:>7.2f}")


if __name__ == "__main__":
    main()
