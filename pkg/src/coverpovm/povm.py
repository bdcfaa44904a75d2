"""Generalized Pauli groups, magic/fiducial candidates, and IC-POVM reports.

Dimensions factor as tensor products: factor_dims [2, 2] is the two-qubit
Pauli group, [d] the single-qudit Weyl-Heisenberg group.  Basis order is the
usual Kronecker order (first factor most significant).  All numerics are
double precision with the tolerances spelled out per function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lowindex import SubgroupRecord
from .todd_coxeter import PermutationRep

__all__ = [
    "PauliGroupSpec",
    "PauliOperator",
    "StateVector",
    "PovmReport",
    "ScanResult",
    "default_factors",
    "pauli_group",
    "permutation_matrix",
    "candidate_fiducials",
    "stabilizer_test",
    "pauli_orbit",
    "gram_analysis",
    "povm_scan",
]

DEFAULT_ELEMENT_CAP = 20000
PHASE_TOL = 1e-9
RANK_CUTOFF = 1e-8
SIC_TOL = 1e-8
CLUSTER_GAP = 1e-6


def default_factors(d: int) -> tuple[int, ...]:
    """Prime factorization of d in increasing order (d=4 -> (2,2))."""
    out = []
    m, q = d, 2
    while q * q <= m:
        while m % q == 0:
            out.append(q)
            m //= q
        q += 1
    if m > 1:
        out.append(m)
    return tuple(out) if out else (1,)


@dataclass(frozen=True)
class PauliGroupSpec:
    """Tensor factorization of the Pauli group's dimension."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        if not self.factor_dims or any(m < 2 for m in self.factor_dims):
            raise ValueError("factor dimensions must all be >= 2")

    @property
    def dimension(self) -> int:
        out = 1
        for m in self.factor_dims:
            out *= m
        return out

    @classmethod
    def for_dimension(cls, d: int, factors=None) -> "PauliGroupSpec":
        spec = cls(tuple(factors) if factors else default_factors(d))
        if spec.dimension != d:
            raise ValueError(f"factors {spec.factor_dims} do not multiply to {d}")
        return spec


@dataclass(frozen=True)
class PauliOperator:
    """Tensor product over factors of X^a Z^b (phases ignored)."""

    exponents: tuple[tuple[int, int], ...]
    matrix: np.ndarray = field(compare=False, repr=False)


def _factor_xz(m: int, a: int, b: int) -> np.ndarray:
    """X^a Z^b in dimension m: X|j> = |j+1 mod m>, Z|j> = w_m^j |j>."""
    omega = np.exp(2j * np.pi / m)
    mat = np.zeros((m, m), dtype=complex)
    for j in range(m):
        mat[(j + a) % m, j] = omega ** (j * b)
    return mat


def pauli_group(spec: PauliGroupSpec) -> list[PauliOperator]:
    """All d^2 Pauli operators of the given factorization, identity first."""
    per_factor = []
    for m in spec.factor_dims:
        per_factor.append([(a, b) for a in range(m) for b in range(m)])
    ops = []
    for combo in itertools.product(*per_factor):
        mat = np.array([[1.0 + 0j]])
        for m, (a, b) in zip(spec.factor_dims, combo):
            mat = np.kron(mat, _factor_xz(m, a, b))
        ops.append(PauliOperator(tuple(combo), mat))
    return ops


def permutation_matrix(perm) -> np.ndarray:
    """Orthogonal matrix with entry (perm(j), j) = 1."""
    d = len(perm)
    mat = np.zeros((d, d))
    for j, i in enumerate(perm):
        mat[i, j] = 1.0
    return mat


def _canonical_phase(amps: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("zero vector")
    amps = amps / nrm
    for a in amps:
        if abs(a) > PHASE_TOL:
            return amps * (a.conjugate() / abs(a))
    raise ValueError("zero vector")


@dataclass(frozen=True)
class StateVector:
    """Unit vector with canonical global phase (first nonzero entry > 0)."""

    dimension: int
    amplitudes: np.ndarray = field(repr=False)

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        amps = _canonical_phase(np.asarray(amps, dtype=complex))
        return cls(len(amps), amps)

    def key(self, decimals: int = 9) -> tuple:
        """Rounded amplitude tuple for dedup and canonical ordering."""
        return tuple(
            (round(a.real, decimals) + 0.0, round(a.imag, decimals) + 0.0)
            for a in self.amplitudes
        )

    def matches(self, other_amps, tol: float = 1e-8) -> bool:
        """Equality with another vector up to global phase."""
        other = _canonical_phase(np.asarray(other_amps, dtype=complex))
        return bool(np.all(np.abs(self.amplitudes - other) <= tol))


def _perm_cycles(perm) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for i in range(len(perm)):
        if not seen[i]:
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = perm[j]
            cycles.append(cyc)
    return cycles


def _cycle_dft_eigenvectors(perm) -> list[np.ndarray]:
    """Eigenvectors of the permutation matrix from its cycle structure.

    One Fourier vector per cycle and DFT index, plus balanced two-cycle
    superpositions (v1 + xi*v2)/sqrt(2) over root-of-unity relative phases
    whenever two cycles share an eigenvalue; the latter are the degenerate
    combinations that carry fiducials such as the equiangular 5-dit one.
    """
    from math import lcm

    d = len(perm)
    singles: list[tuple[int, int, np.ndarray]] = []  # (length, k, vector)
    for cyc in _perm_cycles(perm):
        length = len(cyc)
        for k in range(length):
            v = np.zeros(d, dtype=complex)
            for j, point in enumerate(cyc):
                v[point] = np.exp(-2j * np.pi * k * j / length)
            singles.append((length, k, v / np.sqrt(length)))
    out = [v for _, _, v in singles]
    for a in range(len(singles)):
        la, ka, va = singles[a]
        for b in range(a + 1, len(singles)):
            lb, kb, vb = singles[b]
            if np.any(np.abs(va) * np.abs(vb) > 0):
                continue  # same cycle: not a degenerate pair
            if ka * lb != kb * la:
                continue  # different eigenvalues exp(-2pi i k/l)
            m = lcm(la, lb)
            for t in range(m):
                xi = np.exp(2j * np.pi * t / m)
                out.append((va + xi * vb) / np.sqrt(2.0))
    return out


def _image_elements(rep: PermutationRep, cap: int):
    """(elements, cap_hit): BFS closure of the image, identity excluded."""
    n = rep.degree
    ident = tuple(range(n))
    gens = [tuple(g) for g in rep.images]
    inv = [tuple(sorted(range(n), key=lambda i: g[i])) for g in rep.images]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens + inv:
                b = tuple(g[a[i]] for i in range(n))
                if b not in seen:
                    if len(seen) >= cap:
                        # fall back: generators and pairwise products only
                        small = set(gens)
                        for g1 in gens:
                            for g2 in gens:
                                small.add(tuple(g2[g1[i]] for i in range(n)))
                        small.discard(ident)
                        return sorted(small), True
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    seen.discard(ident)
    return sorted(seen), False


def stabilizer_test(psi: StateVector, spec: PauliGroupSpec) -> bool:
    """True iff psi is a joint eigenvector of a maximal (d-element) stabilizer.

    Counts Pauli operators with |<psi|P|psi>| = 1 within 1e-9; the count is d
    exactly when psi is a stabilizer state.
    """
    amps = psi.amplitudes
    count = 0
    for op in pauli_group(spec):
        val = abs(np.vdot(amps, op.matrix @ amps))
        if abs(val - 1.0) <= PHASE_TOL:
            count += 1
    return count == psi.dimension


@dataclass
class CandidateSet:
    states: list[StateVector]  # magic (non-stabilizer) candidates
    stabilizer_states: list[StateVector]
    element_cap_hit: bool = False


def candidate_fiducials(
    rep: PermutationRep,
    element_cap: int = DEFAULT_ELEMENT_CAP,
    spec: PauliGroupSpec | None = None,
) -> CandidateSet:
    """Magic candidates: cycle-DFT eigenvectors of image permutation matrices.

    Enumerates the image group up to element_cap (falling back to generators
    plus pairwise products beyond it), builds each element's cycle-wise
    Fourier eigenbasis, dedups up to global phase, and drops stabilizer
    states of the given Pauli factorization (default: prime factors).
    """
    d = rep.degree
    if d == 1:
        return CandidateSet([], [], False)
    if spec is None:
        spec = PauliGroupSpec.for_dimension(d)
    if spec.dimension != d:
        raise ValueError("Pauli spec dimension must equal the degree")
    elements, cap_hit = _image_elements(rep, element_cap)
    seen: dict[tuple, StateVector] = {}
    for perm in elements:
        for v in _cycle_dft_eigenvectors(perm):
            sv = StateVector.from_amplitudes(v)
            seen.setdefault(sv.key(), sv)
    magic, stab = [], []
    for k in sorted(seen):
        s = seen[k]
        (stab if stabilizer_test(s, spec) else magic).append(s)
    return CandidateSet(magic, stab, cap_hit)


def pauli_orbit(psi: StateVector, spec: PauliGroupSpec) -> list[np.ndarray]:
    """The d^2 rank-1 projectors P |psi><psi| P^dagger."""
    amps = psi.amplitudes
    out = []
    for op in pauli_group(spec):
        v = op.matrix @ amps
        out.append(np.outer(v, v.conjugate()))
    return out


@dataclass
class PovmReport:
    """IC/equiangularity certificate for one fiducial's Pauli orbit."""

    dimension: int
    fiducial: StateVector
    gram_rank: int
    pp: int
    is_ic: bool
    is_equiangular: bool
    is_sic: bool
    angles: list[tuple[float, int]]  # (Hermitian angle value, multiplicity)
    products: list[tuple[float, int]]  # raw |<pi|pj>| clusters before merging
    from_stabilizer: bool = False  # fiducial was a stabilizer state (fallback)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "fiducial_real": [round(a.real, 12) for a in self.fiducial.amplitudes],
            "fiducial_imag": [round(a.imag, 12) for a in self.fiducial.amplitudes],
            "gram_rank": self.gram_rank,
            "pp": self.pp,
            "is_ic": self.is_ic,
            "is_equiangular": self.is_equiangular,
            "is_sic": self.is_sic,
            "angles": [[round(v, 12), m] for v, m in self.angles],
            "products": [[round(v, 12), m] for v, m in self.products],
            "from_stabilizer": self.from_stabilizer,
        }


def _near_rational(x: float, max_den: int = 256, tol: float = 1e-6) -> bool:
    from fractions import Fraction

    return abs(x - Fraction(x).limit_denominator(max_den)) <= tol


def _merge_conjugate_clusters(
    clusters: list[tuple[float, int]],
) -> list[tuple[float, int]]:
    """Fold Galois-conjugate pairwise-product values into Hermitian angles.

    A value that is rational (or whose square is rational: the |.|-folded
    quadratic case) stands alone; groups of two or three values whose
    elementary symmetric functions are rational form one conjugate orbit.
    Each orbit contributes the |field norm|^(1/deg) angle, i.e. the
    geometric mean of the orbit; angles agreeing within 1e-6 then coincide.
    """
    loose = []
    for v, m in clusters:
        if _near_rational(v) or _near_rational(v * v):
            loose.append(([v], m))
        else:
            loose.append(None)
    open_idx = [i for i, x in enumerate(loose) if x is None]
    # pairs, then triples, of non-rational values with rational symmetrics
    for size in (2, 3):
        changed = True
        while changed:
            changed = False
            for combo in itertools.combinations(open_idx, size):
                vals = [clusters[i][0] for i in combo]
                mults = [clusters[i][1] for i in combo]
                prod = float(np.prod(vals))
                symm_ok = _near_rational(prod) and _near_rational(sum(vals))
                if size == 3:
                    e2 = (vals[0] * vals[1] + vals[0] * vals[2]
                          + vals[1] * vals[2])
                    symm_ok = symm_ok and _near_rational(e2)
                if symm_ok and len(set(mults)) == 1:
                    loose[combo[0]] = ([clusters[i][0] for i in combo],
                                       sum(mults))
                    for i in combo[1:]:
                        loose[i] = ([], 0)
                    open_idx = [i for i in open_idx if i not in combo]
                    changed = True
                    break
    for i in open_idx:  # unresolved: keep as standalone angle values
        loose[i] = ([clusters[i][0]], clusters[i][1])
    angles: list[tuple[float, int]] = []
    for entry in loose:
        if entry is None or not entry[0]:
            continue
        vals, m = entry
        angle = float(np.prod(vals)) ** (1.0 / len(vals))
        for j, (a, ma) in enumerate(angles):
            if abs(a - angle) <= CLUSTER_GAP:
                angles[j] = (a, ma + m)
                break
        else:
            angles.append((angle, m))
    angles.sort()
    return angles


def gram_analysis(projectors, fiducial: StateVector | None = None,
                  rank_cutoff: float = RANK_CUTOFF,
                  sic_tol: float = SIC_TOL) -> PovmReport:
    """Gram rank, distinct pairwise products, and SIC/equiangular flags.

    Rank counts singular values above rank_cutoff (relative, default 1e-8).
    The pairwise products |<psi_i|psi_j>| are clustered with a 1e-6 gap; pp
    then counts the distinct Hermitian angles after Galois-conjugate clusters
    are folded by their geometric mean (the |field norm|^(1/deg) of the
    product), which is what the tables tally for products living in quadratic
    subfields.  The SIC test checks every off-diagonal |<psi_i|psi_j>|^2
    against 1/(d+1) within sic_tol (absolute, default 1e-8).
    """
    stack = np.asarray(projectors)
    nproj = stack.shape[0]
    d = stack.shape[1]
    gram = np.einsum("aij,bji->ab", stack, stack).real
    svals = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(svals > rank_cutoff * svals[0]))
    off = np.sqrt(np.clip(gram[~np.eye(nproj, dtype=bool)], 0.0, None))
    values = np.sort(off)
    clusters: list[tuple[float, int]] = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > CLUSTER_GAP:
            chunk = values[start:i]
            clusters.append((float(chunk.mean()), len(chunk)))
            start = i
    angles = _merge_conjugate_clusters(clusters)
    pp = len(angles)
    sic_target = 1.0 / (d + 1)
    is_sic = bool(np.all(np.abs(off ** 2 - sic_target) <= sic_tol))
    return PovmReport(
        dimension=d,
        fiducial=fiducial,
        gram_rank=rank,
        pp=pp,
        is_ic=rank == d * d,
        is_equiangular=pp == 1,
        is_sic=is_sic,
        angles=angles,
        products=clusters,
    )


@dataclass
class ScanResult:
    best: PovmReport | None
    reports: list[PovmReport]
    element_cap_hit: bool


def povm_scan(
    record: SubgroupRecord,
    spec: PauliGroupSpec | None = None,
    element_cap: int = DEFAULT_ELEMENT_CAP,
    rank_cutoff: float = RANK_CUTOFF,
    sic_tol: float = SIC_TOL,
) -> ScanResult:
    """Run gram_analysis over every candidate fiducial of a covering.

    "best" maximizes gram_rank, then minimizes pp, then takes the earliest
    fiducial in canonical order; the scan is deterministic.
    """
    d = record.index
    if spec is None:
        spec = PauliGroupSpec.for_dimension(d)
    if spec.dimension != d:
        raise ValueError("Pauli spec dimension must equal the covering degree")
    cands = candidate_fiducials(record.rep, element_cap, spec)
    reports = []
    for s in cands.states:
        reports.append(gram_analysis(pauli_orbit(s, spec), s, rank_cutoff, sic_tol))
    if not reports:
        # no magic candidates (cyclic-type coverings): report the stabilizer
        # eigenstates' orbits anyway, flagged as such
        for s in cands.stabilizer_states:
            r = gram_analysis(pauli_orbit(s, spec), s, rank_cutoff, sic_tol)
            r.from_stabilizer = True
            reports.append(r)
    best = None
    for rep_ in reports:
        if best is None or (-rep_.gram_rank, rep_.pp) < (-best.gram_rank, best.pp):
            best = rep_
    return ScanResult(best, reports, cands.element_cap_hit)
