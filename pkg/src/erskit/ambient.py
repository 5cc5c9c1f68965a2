"""Ambient space for elliptic root systems.

An affine Cartan matrix of rank l+1 is embedded in an (l+4)-dimensional
space E with distinguished basis (alpha_0, ..., alpha_l, Ld, a, La) and a
symmetric bilinear form J.  Ld pairs with the null root, a spans the
marking line, La pairs with a.  All arithmetic is exact (Fractions).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]


class ConfigError(ValueError):
    """Invalid affine type / configuration data."""


class DomainError(ValueError):
    """Operation applied outside its domain (e.g. isotropic reflection)."""


# ---------------------------------------------------------------------------
# affine types
# ---------------------------------------------------------------------------

# family tag -> (display pattern, rank predicate, description of constraint)
_FAMILIES = {
    "A(1)": (lambda l: l >= 2, "A_l^(1) needs l >= 2"),
    "B(1)": (lambda l: l >= 3, "B_l^(1) needs l >= 3"),
    "C(1)": (lambda l: l >= 2, "C_l^(1) needs l >= 2"),
    "D(1)": (lambda l: l >= 4, "D_l^(1) needs l >= 4"),
    "E(1)": (lambda l: l in (6, 7, 8), "E_l^(1) needs l in {6,7,8}"),
    "F(1)": (lambda l: l == 4, "F_4^(1) needs l = 4"),
    "G(1)": (lambda l: l == 2, "G_2^(1) needs l = 2"),
    "A_even(2)": (lambda l: l >= 2, "A_2l^(2) needs l >= 2"),
    "A_odd(2)": (lambda l: l >= 3, "A_2l-1^(2) needs l >= 3"),
    "D(2)": (lambda l: l >= 2, "D_l+1^(2) needs l >= 2"),
    "E(2)": (lambda l: l == 4, "E_6^(2) needs l = 4"),
    "D(3)": (lambda l: l == 2, "D_4^(3) needs l = 2"),
}

_TYPE_RE = re.compile(r"^([ABCDEFG])(\d+)\^?\((\d)\)$")


@dataclass(frozen=True)
class AffineType:
    family: str
    l: int

    def __post_init__(self):
        pred, msg = _FAMILIES[self.family]
        if not pred(self.l):
            raise ConfigError(msg + f" (got l={self.l})")

    @property
    def name(self) -> str:
        letter = self.family[0]
        if self.family == "A_even(2)":
            return f"A{2 * self.l}^(2)"
        if self.family == "A_odd(2)":
            return f"A{2 * self.l - 1}^(2)"
        if self.family == "D(2)":
            return f"D{self.l + 1}^(2)"
        if self.family == "E(2)":
            return "E6^(2)"
        if self.family == "D(3)":
            return "D4^(3)"
        return f"{letter}{self.l}^(1)"

    @property
    def twist(self) -> int:
        return int(self.family[-2])

    def __str__(self):
        return self.name


def parse_type(s: str) -> AffineType:
    m = _TYPE_RE.match(s.strip())
    if not m:
        raise ConfigError(f"cannot parse affine type token {s!r}")
    letter, n, r = m.group(1), int(m.group(2)), int(m.group(3))
    if r == 1:
        fam = f"{letter}(1)"
        if fam not in _FAMILIES:
            raise ConfigError(f"unknown family in {s!r}")
        return AffineType(fam, n)
    if r == 2:
        if letter == "A":
            if n % 2 == 0:
                return AffineType("A_even(2)", n // 2)
            return AffineType("A_odd(2)", (n + 1) // 2)
        if letter == "D":
            return AffineType("D(2)", n - 1)
        if letter == "E":
            if n != 6:
                raise ConfigError(f"unknown twisted type {s!r}")
            return AffineType("E(2)", 4)
        raise ConfigError(f"unknown twisted family in {s!r}")
    if r == 3:
        if letter == "D" and n == 4:
            return AffineType("D(3)", 2)
        raise ConfigError(f"unknown triple-twist type {s!r}")
    raise ConfigError(f"unsupported twist ({r}) in {s!r}")


# ---------------------------------------------------------------------------
# generalized Cartan matrices, Kac numbering (node 0 = affine node)
# ---------------------------------------------------------------------------

def _chain_edges(lo: int, hi: int):
    return [(i, i + 1) for i in range(lo, hi)]


def cartan_matrix(t: AffineType) -> list[list[int]]:
    l = t.l
    n = l + 1
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def edge(i, j, aij=-1, aji=-1):
        A[i][j] = aij
        A[j][i] = aji

    fam = t.family
    if fam == "A(1)":
        for i, j in _chain_edges(0, l):
            edge(i, j)
        edge(0, l)
    elif fam == "B(1)":
        edge(0, 2)
        edge(1, 2)
        for i, j in _chain_edges(2, l - 1):
            edge(i, j)
        edge(l - 1, l, -1, -2)
    elif fam == "C(1)":
        edge(0, 1, -1, -2)
        for i, j in _chain_edges(1, l - 1):
            edge(i, j)
        edge(l - 1, l, -2, -1)
    elif fam == "D(1)":
        edge(0, 2)
        edge(1, 2)
        for i, j in _chain_edges(2, l - 2):
            edge(i, j)
        edge(l - 2, l - 1)
        edge(l - 2, l)
    elif fam == "E(1)":
        if l == 6:
            for i, j in [(1, 2), (2, 3), (3, 4), (4, 5), (3, 6), (6, 0)]:
                edge(i, j)
        elif l == 7:
            for i, j in _chain_edges(0, 6) + [(7, 3)]:
                edge(i, j)
        else:
            for i, j in _chain_edges(0, 7) + [(8, 5)]:
                edge(i, j)
    elif fam == "F(1)":
        edge(0, 1)
        edge(1, 2)
        edge(2, 3, -1, -2)
        edge(3, 4)
    elif fam == "G(1)":
        edge(0, 1)
        edge(1, 2, -1, -3)
    elif fam == "A_even(2)":
        edge(0, 1, -2, -1)
        for i, j in _chain_edges(1, l - 1):
            edge(i, j)
        edge(l - 1, l, -2, -1)
    elif fam == "A_odd(2)":
        edge(0, 2)
        edge(1, 2)
        for i, j in _chain_edges(2, l - 1):
            edge(i, j)
        edge(l - 1, l, -2, -1)
    elif fam == "D(2)":
        edge(0, 1, -2, -1)
        for i, j in _chain_edges(1, l - 1):
            edge(i, j)
        edge(l - 1, l, -1, -2)
    elif fam == "E(2)":
        edge(0, 1)
        edge(1, 2)
        edge(2, 3, -2, -1)
        edge(3, 4)
    elif fam == "D(3)":
        edge(0, 1)
        edge(1, 2, -3, -1)
    else:  # pragma: no cover
        raise ConfigError(f"unknown family {fam}")
    return A


def _symmetrize(A: list[list[int]]) -> list[list[Fraction]]:
    """B_ij = d_i * a_ij, with the minimal scaling that keeps B integral."""
    n = len(A)
    d = [None] * n
    d[0] = Fraction(1)
    queue = [0]
    while queue:
        i = queue.pop()
        for j in range(n):
            if i != j and A[i][j] != 0 and d[j] is None:
                d[j] = d[i] * A[i][j] / A[j][i]
                queue.append(j)
    if any(x is None for x in d):
        raise ConfigError("Cartan diagram is not connected")
    B = [[d[i] * A[i][j] for j in range(n)] for i in range(n)]
    entries = [x for row in B for x in row if x != 0]
    # minimal positive t with t*entry integral for every entry
    g = Fraction(0)
    for e in entries:
        g = _frac_gcd(g, abs(e))
    t = 1 / g
    # t*B is integral; divide further by the gcd of the integer entries
    ints = [int(t * e) for e in entries]
    common = 0
    for v in ints:
        common = gcd(common, abs(v))
    t = t / common
    return [[t * x for x in row] for row in B]


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    if a == 0:
        return b
    if b == 0:
        return a
    from math import lcm

    return Fraction(gcd(a.numerator, b.numerator), lcm(a.denominator, b.denominator))


# ---------------------------------------------------------------------------
# the ambient space
# ---------------------------------------------------------------------------

class AmbientSpace:
    """Immutable carrier of the basis (alpha_0..alpha_l, Ld, a, La) and J."""

    def __init__(self, affine_type: AffineType):
        self.type = affine_type
        self.l = affine_type.l
        self.n_nodes = self.l + 1
        self.dim = self.l + 4
        self.r = 2 if affine_type.family == "A_even(2)" else 1
        self.cartan = cartan_matrix(affine_type)
        self.sym = _symmetrize(self.cartan)
        _check_affine_block(self.sym)
        self.idx_Ld = self.l + 1
        self.idx_a = self.l + 2
        self.idx_La = self.l + 3
        self.gram = self._build_gram()
        self._delta = None

    def _build_gram(self) -> tuple[Vec, ...]:
        n = self.dim
        g = [[Fraction(0)] * n for _ in range(n)]
        for i in range(self.n_nodes):
            for j in range(self.n_nodes):
                g[i][j] = Fraction(self.sym[i][j])
        g[self.idx_Ld][0] = g[0][self.idx_Ld] = Fraction(1, self.r)
        g[self.idx_a][self.idx_La] = g[self.idx_La][self.idx_a] = Fraction(1)
        # everything else involving Ld, a, La is 0 (including J(Ld, La) = 0)
        rows = tuple(tuple(r) for r in g)
        if _det(rows) == 0:
            raise ConfigError("degenerate gram matrix")
        return rows

    # -- basis vectors ------------------------------------------------
    def basis_vector(self, i: int) -> Vec:
        v = [Fraction(0)] * self.dim
        v[i] = Fraction(1)
        return tuple(v)

    def alpha(self, i: int) -> Vec:
        if not 0 <= i <= self.l:
            raise ConfigError(f"node index {i} out of range 0..{self.l}")
        return self.basis_vector(i)

    @property
    def Lambda_delta(self) -> Vec:
        return self.basis_vector(self.idx_Ld)

    @property
    def a_vec(self) -> Vec:
        return self.basis_vector(self.idx_a)

    @property
    def Lambda_a(self) -> Vec:
        return self.basis_vector(self.idx_La)

    def basis_labels(self) -> list[str]:
        return [f"a{i}" for i in range(self.n_nodes)] + ["Ld", "a", "La"]

    # -- form and reflections -----------------------------------------
    def j(self, x: Vec, y: Vec) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.gram[i]
            for k, yk in enumerate(y):
                if yk != 0:
                    total += xi * row[k] * yk
        return total

    def covector(self, x: Vec) -> Vec:
        nx = self.j(x, x)
        if nx == 0:
            raise DomainError("covector of an isotropic vector")
        return tuple(2 * c / nx for c in x)

    def reflect(self, x: Vec, y: Vec) -> Vec:
        """s_x(y) = y - J(x_vee, y) x; x must be non-isotropic."""
        nx = self.j(x, x)
        if nx == 0:
            raise DomainError("reflection in an isotropic vector")
        coef = 2 * self.j(x, y) / nx
        return tuple(yc - coef * xc for yc, xc in zip(y, x))

    def cartan_pairing(self, i: int, j: int) -> int:
        """J(alpha_i_vee, alpha_j) = a_ij."""
        return self.cartan[i][j]

    # -- derived data -------------------------------------------------
    def null_root(self) -> Vec:
        """delta in Z_+ Pi with Z delta the isotropic part of Z Pi."""
        if self._delta is None:
            marks = _kernel_marks(self.sym)
            v = [Fraction(0)] * self.dim
            for i, m in enumerate(marks):
                v[i] = Fraction(m)
            delta = tuple(v)
            assert self.j(delta, delta) == 0
            assert self.j(self.Lambda_delta, delta) == 1
            self._delta = delta
        return self._delta

    def delta_marks(self) -> list[int]:
        return [int(self.null_root()[i]) for i in range(self.n_nodes)]

    def node_orbit_classes(self) -> list[set[int]]:
        """Node classes joined by (-1,-1) edges (the W-invariance criterion)."""
        parent = list(range(self.n_nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.n_nodes):
            for j in range(i + 1, self.n_nodes):
                if self.cartan[i][j] == -1 and self.cartan[j][i] == -1:
                    parent[find(i)] = find(j)
        classes: dict[int, set[int]] = {}
        for i in range(self.n_nodes):
            classes.setdefault(find(i), set()).add(i)
        return list(classes.values())

    def is_w_invariant(self, f: dict[int, object]) -> bool:
        if set(f) != set(range(self.n_nodes)):
            raise ConfigError("map must be total on the node set")
        return all(
            len({f[i] for i in cls}) == 1 for cls in self.node_orbit_classes()
        )

    def orbit_key(self, beta: Vec) -> Fraction:
        nb = self.j(beta, beta)
        if nb == 0:
            raise DomainError("orbit key of an isotropic vector")
        return nb

    def __repr__(self):
        return f"AmbientSpace({self.type.name})"


def build_ambient(affine_type: AffineType | str) -> AmbientSpace:
    if isinstance(affine_type, str):
        affine_type = parse_type(affine_type)
    return AmbientSpace(affine_type)


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------

def _det(m: tuple[Vec, ...]) -> Fraction:
    n = len(m)
    a = [list(row) for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def _check_affine_block(B: list[list[Fraction]]) -> None:
    """The symmetrized block must be PSD with a 1-dimensional kernel."""
    n = len(B)
    a = [[Fraction(x) for x in row] for row in B]
    alive = list(range(n))
    rank = 0
    while alive:
        piv = next((i for i in alive if a[i][i] > 0), None)
        if piv is None:
            # PSD requires every remaining row to vanish entirely
            for i in alive:
                if a[i][i] < 0 or any(a[i][j] != 0 for j in alive):
                    raise ConfigError("Cartan block is not positive semidefinite")
            break
        rank += 1
        alive.remove(piv)
        p = a[piv][piv]
        for i in alive:
            if a[i][piv] != 0:
                f = a[i][piv] / p
                for j in alive:
                    a[i][j] -= f * a[piv][j]
                a[i][piv] = Fraction(0)
    if rank != n - 1:
        raise ConfigError(f"Cartan block has corank {n - rank}, expected 1")


def _kernel_marks(B: list[list[Fraction]]) -> list[int]:
    """Coprime positive integer kernel vector of the symmetrized block."""
    n = len(B)
    a = [list(row) + [Fraction(0)] for row in B]
    # Gaussian elimination to RREF on the first n columns
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    assert len(free) == 1
    fc = free[0]
    sol = [Fraction(0)] * n
    sol[fc] = Fraction(1)
    for row_i, c in enumerate(pivots):
        sol[c] = -a[row_i][fc]
    denom_lcm = 1
    for x in sol:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in sol]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    ints = [v // g for v in ints]
    if any(v < 0 for v in ints):
        ints = [-v for v in ints]
    assert all(v > 0 for v in ints)
    return ints


def vec_add(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(c, x: Vec) -> Vec:
    c = Fraction(c)
    return tuple(c * a for a in x)


def vec_neg(x: Vec) -> Vec:
    return tuple(-a for a in x)
