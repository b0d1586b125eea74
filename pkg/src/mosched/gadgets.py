"""Hardness-reduction generators and deciders for their source problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .core import Instance, Organization
from .errors import ValidationError


@dataclass(frozen=True)
class ThreePartitionInstance:
    B: int
    integers: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "integers", tuple(int(x) for x in self.integers))
        if self.B < 1:
            raise ValidationError("3-Partition target must be positive")
        if not self.integers or len(self.integers) % 3:
            raise ValidationError("3-Partition needs a positive multiple of 3 integers")
        if any(x < 1 for x in self.integers):
            raise ValidationError("3-Partition integers must be positive")
        if sum(self.integers) != self.q * self.B:
            raise ValidationError(
                f"integers sum to {sum(self.integers)}, expected q*B = {self.q * self.B}")

    @property
    def q(self) -> int:
        return len(self.integers) // 3

    @property
    def restricted(self) -> bool:
        return all(self.B < 4 * x and 2 * x < self.B for x in self.integers)


@dataclass(frozen=True)
class BinPackingInstance:
    integers: tuple[int, ...]
    B: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "integers", tuple(int(x) for x in self.integers))
        if not self.integers:
            raise ValidationError("bin packing needs at least one integer")
        if self.k < 1 or self.B < 1:
            raise ValidationError("bin count and capacity must be positive")
        if any(x < 1 for x in self.integers):
            raise ValidationError("bin packing integers must be positive")
        big = [x for x in self.integers if x > self.B]
        if big:
            raise ValidationError(f"integers {big} exceed the capacity {self.B}")

    @property
    def y(self) -> int:
        return len(self.integers)


@dataclass(frozen=True)
class GadgetOutput:
    instance: Instance
    target: int
    certificate: dict[str, Any] = field(default_factory=dict, compare=False)


def tp_scale(tp: ThreePartitionInstance, l: int) -> ThreePartitionInstance:
    if l < 1:
        raise ValueError("scale factor must be positive")
    out = ThreePartitionInstance(tp.B * l, tuple(x * l for x in tp.integers))
    if out.B > 2**63 - 1:
        raise OverflowError("scaled 3-Partition target exceeds 64 bits")
    return out


def tp_decide(tp: ThreePartitionInstance) -> bool:
    """Exhaustive search for q triplets summing to B.

    The smallest remaining integer always opens the next triplet, and equal
    values are tried once per position.
    """
    items = sorted(tp.integers)
    used = [False] * len(items)

    def rec(left: int) -> bool:
        if left == 0:
            return True
        a = used.index(False)
        used[a] = True
        prev_b = None
        for b in range(a + 1, len(items)):
            if used[b] or items[b] == prev_b:
                continue
            prev_b = items[b]
            need = tp.B - items[a] - items[b]
            if need < items[b]:
                break
            used[b] = True
            for c in range(b + 1, len(items)):
                if not used[c] and items[c] == need:
                    used[c] = True
                    if rec(left - 1):
                        return True
                    used[c] = False
                    break
            used[b] = False
        used[a] = False
        return False

    return rec(tp.q)


def bp_decide(bp: BinPackingInstance) -> bool:
    """Exact bin packing by backtracking, largest item first.

    Bins with equal current load are interchangeable, so only the first of
    them is tried.
    """
    items = sorted(bp.integers, reverse=True)
    if sum(items) > bp.k * bp.B:
        return False
    loads = [0] * bp.k

    def rec(i: int) -> bool:
        if i == len(items):
            return True
        seen = set()
        for b in range(bp.k):
            if loads[b] in seen or loads[b] + items[i] > bp.B:
                continue
            seen.add(loads[b])
            loads[b] += items[i]
            if rec(i + 1):
                return True
            loads[b] -= items[i]
        return False

    return rec(0)


def _require_restricted(tp: ThreePartitionInstance, name: str = "tp") -> None:
    if not tp.restricted:
        raise ValidationError(f"{name} is not restricted: every integer must lie strictly "
                              f"between B/4 = {tp.B / 4} and B/2 = {tp.B / 2}")


def gen_sumc_hardness(tp: ThreePartitionInstance) -> GadgetOutput:
    """q one-machine integer organizations and q two-machine triplet
    organizations holding three jobs of length B each."""
    _require_restricted(tp)
    orgs = [Organization(1, tp.integers[3 * i:3 * i + 3]) for i in range(tp.q)]
    orgs += [Organization(2, (tp.B,) * 3) for _ in range(tp.q)]
    target = 5 * tp.q * tp.B
    cert = {"gadget": "sumc-np", "q": tp.q, "B": tp.B, "total": tp.q * tp.B,
            "integer_orgs": list(range(1, tp.q + 1)),
            "triplet_orgs": list(range(tp.q + 1, 2 * tp.q + 1)),
            "target": target}
    return GadgetOutput(Instance(tuple(orgs)), target, cert)


def _even(tp: ThreePartitionInstance) -> tuple[ThreePartitionInstance, bool]:
    return (tp_scale(tp, 2), True) if tp.B % 2 else (tp, False)


def gen_dp_hardness(tp: ThreePartitionInstance, tp2: ThreePartitionInstance) -> GadgetOutput:
    """Two organizations; a makespan-``f*B`` schedule exists iff ``tp`` is a
    yes-instance and ``tp2`` is a no-instance."""
    _require_restricted(tp, "tp")
    _require_restricted(tp2, "tp'")
    a, a_doubled = _even(tp)
    b, b_doubled = _even(tp2)
    f = 3 * b.B // 2 + 1
    long_job = f * a.B - 3 * b.B // 2
    org1 = Organization(a.q, tuple(x * f for x in a.integers) + (b.B // 2 + 1,))
    org2 = Organization(b.q, b.integers + (long_job,) * b.q)
    target = f * a.B
    cert = {"gadget": "dp-hard", "f": f, "B": a.B, "B_prime": b.B,
            "doubled": a_doubled, "doubled_prime": b_doubled,
            "long_job": long_job, "target": target}
    return GadgetOutput(Instance((org1, org2)), target, cert)


_TRIVIAL_YES = GadgetOutput(Instance((Organization(1, (1,)),)), 1)
_TRIVIAL_NO = GadgetOutput(Instance((Organization(1, (1,)),)), 0)


def gen_binpacking_hardness(bp: BinPackingInstance) -> GadgetOutput:
    """One integer organization on k machines and k bin organizations, each
    with y machines and y+1 jobs of length B.

    Integers equal to B fill a bin on their own and are removed first along
    with one bin.  If that leaves nothing to decide, a fixed trivial yes or no
    instance is returned.
    """
    rest = [x for x in bp.integers if x < bp.B]
    k = bp.k - (bp.y - len(rest))
    cert: dict[str, Any] = {"gadget": "binpack", "stripped": bp.y - len(rest),
                            "B": bp.B, "k": k, "y": len(rest)}
    if k < 0 or (k == 0 and rest) or not rest:
        answer = k >= 0 and not rest
        out = _TRIVIAL_YES if answer else _TRIVIAL_NO
        cert.update(trivial=answer, target=out.target)
        return GadgetOutput(out.instance, out.target, cert)
    y = len(rest)
    orgs = [Organization(k, tuple(rest))]
    orgs += [Organization(y, (bp.B,) * (y + 1)) for _ in range(k)]
    target = k * (y + 1) * bp.B + 2 * sum(rest)
    cert.update(trivial=None, target=target, bin_local_sumc=(y + 2) * bp.B)
    return GadgetOutput(Instance(tuple(orgs)), target, cert)


def canonical_yes(q: int) -> ThreePartitionInstance:
    return ThreePartitionInstance(6, (2,) * (3 * q))


def canonical_no(q: int) -> ThreePartitionInstance:
    """B = 18 with equally many 5s and 7s, plus one 6 when the count is odd.

    With three integers that recipe gives 5+6+7 = 18, a yes-instance, so q = 1
    is lifted to q = 2.
    """
    q = max(q, 2)
    n = 3 * q
    ints = (5,) * (n // 2) + (6,) * (n % 2) + (7,) * (n // 2)
    return ThreePartitionInstance(18, ints)


def gen_theta2p(setA: Sequence[ThreePartitionInstance],
                setB: Sequence[ThreePartitionInstance]) -> GadgetOutput:
    """Comparison gadget: makespan T is reachable iff setA holds strictly more
    yes-instances than setB, provided both lists put yes-instances first.

    Gadget i pairs ``setA[i-1]`` with ``setB[i-2]``; a canonical yes-instance
    stands in for setB's missing first entry and a canonical no-instance for
    setA's missing last entry.
    """
    if len(setA) != len(setB):
        raise ValidationError("both lists must have the same length")
    v = len(setA)
    for i, tp in enumerate(list(setA) + list(setB)):
        _require_restricted(tp, f"instance {i + 1}")
    A = list(setA) + [canonical_no(setB[-1].q if v else setA[0].q if setA else 1)]
    Bs = [canonical_yes(A[0].q)] + list(setB)

    gadgets = []
    D_prev = 2
    for i in range(v + 1):
        a, b = A[i], Bs[i]
        qmax = max(a.q, b.q)
        a2, b2 = tp_scale(a, b.B), tp_scale(b, a.B)
        doubled = a2.B % 2 == 1
        if doubled:
            a2, b2 = tp_scale(a2, 2), tp_scale(b2, 2)
        Bi = a2.B
        o = D_prev + 2 * (Bi + qmax**2 * Bi**2)
        D = o + 3 * Bi**2 * qmax // 2
        gadgets.append({"B": Bi, "qmax": qmax, "q": a2.q, "q_prime": b2.q,
                        "o": o, "D": D, "doubled": doubled,
                        "tp": list(a2.integers), "tp_prime": list(b2.integers)})
        D_prev = D
    T = 4 * D_prev

    orgs = []
    global_jobs = [T] * (1 + sum(3 * g["qmax"] for g in gadgets))
    for g in gadgets:
        Bi, qmax, o, D = g["B"], g["qmax"], g["o"], g["D"]
        makespan_job = o + Bi + Bi**2 * qmax
        orgs.append(Organization(qmax + 1, (makespan_job,) + tuple(g["tp"])
                                 + (Bi,) * (qmax - g["q"])))
        orgs.append(Organization(qmax, tuple(Bi * qmax * x for x in g["tp_prime"])
                                 + (Bi * qmax * Bi,) * (qmax - g["q_prime"])
                                 + (o,) * qmax))
        n_eq = qmax * (D - makespan_job) // Bi
        orgs.append(Organization(2 * qmax, (D,) * qmax + (Bi,) * n_eq))
        orgs.append(Organization(qmax, (o,) * qmax))
        orgs.append(Organization(qmax, (1,) * qmax))
        global_jobs.append(T - makespan_job)
        global_jobs += [T - D] * (2 * qmax)
        global_jobs += [T - (o + 1)] * qmax
        g["makespan_job"] = makespan_job
        g["equalizing_jobs"] = n_eq
    orgs.append(Organization(1, tuple(global_jobs)))
    inst = Instance(tuple(orgs))
    cert = {"gadget": "theta2p", "v": v, "target": T, "gadgets": gadgets,
            "global_org": len(orgs)}
    return GadgetOutput(inst, T, cert)
