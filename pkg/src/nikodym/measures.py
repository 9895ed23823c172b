"""Finitely supported signed rational measures on the naturals plus one
out-of-band point PF (the extra point of the one-point compactification).

Atoms are stored sparsely; zero weights never appear.  All arithmetic is
exact (fractions.Fraction).
"""

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import EmptyMeasure, HasPFAtom, UndefinedAt, ValidationError
from .rat import format_rational, parse_rational


class _PFType:
    """Sentinel for the extra point; sorts after every natural."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PF"


PF = _PFType()
Point = Union[int, _PFType]


def _point_key(p: Point):
    return (1, 0) if p is PF else (0, p)


def _check_point(p) -> Point:
    if p is PF:
        return p
    if isinstance(p, int) and not isinstance(p, bool) and p >= 0:
        return p
    raise ValidationError(f"points are naturals or PF, got {p!r}")


class FinMeasure:
    """Immutable finite map point -> nonzero rational weight."""

    __slots__ = ("_atoms",)

    def __init__(self, atoms: Mapping[Point, Fraction] = ()):
        clean = {}
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for p, w in items:
            p = _check_point(p)
            w = Fraction(w)
            if p in clean:
                raise ValidationError(f"duplicate point {p!r}")
            if w != 0:
                clean[p] = w
        self._atoms = dict(sorted(clean.items(), key=lambda kv: _point_key(kv[0])))

    @classmethod
    def delta(cls, p: Point, w=Fraction(1)) -> "FinMeasure":
        return cls({p: Fraction(w)})

    @classmethod
    def zero(cls) -> "FinMeasure":
        return cls()

    def items(self):
        return self._atoms.items()

    def weight(self, p: Point) -> Fraction:
        return self._atoms.get(p, Fraction(0))

    def support(self):
        return list(self._atoms)

    def omega_support(self):
        return [p for p in self._atoms if p is not PF]

    def has_pf_atom(self) -> bool:
        return PF in self._atoms

    def is_zero(self) -> bool:
        return not self._atoms

    def is_nonneg(self) -> bool:
        return all(w > 0 for w in self._atoms.values())

    def __len__(self):
        return len(self._atoms)

    def __eq__(self, other):
        return isinstance(other, FinMeasure) and self._atoms == other._atoms

    def __repr__(self):
        inner = ", ".join(f"{p!r}: {w}" for p, w in self._atoms.items())
        return f"FinMeasure({{{inner}}})"

    # ------------------------------------------------------------- functionals

    def norm(self) -> Fraction:
        """Total variation norm: sum of |weights|."""
        return sum((abs(w) for w in self._atoms.values()), Fraction(0))

    def total_mass(self) -> Fraction:
        """Signed mass of the whole space (value on N_F)."""
        return sum(self._atoms.values(), Fraction(0))

    def mass_of(self, s) -> Fraction:
        """Signed mass of a set (anything with contains_point / contains_pf)."""
        out = Fraction(0)
        for p, w in self._atoms.items():
            if (p is PF and s.contains_pf) or (p is not PF and s.contains_point(p)):
                out += w
        return out

    def variation_on(self, s) -> Fraction:
        """Sum of |weights| over atoms inside the set."""
        out = Fraction(0)
        for p, w in self._atoms.items():
            if (p is PF and s.contains_pf) or (p is not PF and s.contains_point(p)):
                out += abs(w)
        return out

    def at_plus(self) -> Fraction:
        """Largest atom of a nonnegative measure."""
        self._require_nonneg()
        if not self._atoms:
            raise EmptyMeasure("at_plus of the zero measure")
        return max(self._atoms.values())

    def at_minus(self) -> Fraction:
        """Smallest atom of a nonnegative measure."""
        self._require_nonneg()
        if not self._atoms:
            raise EmptyMeasure("at_minus of the zero measure")
        return min(self._atoms.values())

    def _require_nonneg(self):
        if not self.is_nonneg():
            raise ValidationError("operation needs a nonnegative measure")

    # ------------------------------------------------------------ constructors

    def restrict_to(self, s) -> "FinMeasure":
        return FinMeasure({p: w for p, w in self._atoms.items()
                           if (p is PF and s.contains_pf)
                           or (p is not PF and s.contains_point(p))})

    def restrict_omega(self) -> "FinMeasure":
        return FinMeasure({p: w for p, w in self._atoms.items() if p is not PF})

    def scale(self, c) -> "FinMeasure":
        c = Fraction(c)
        return FinMeasure({p: w * c for p, w in self._atoms.items()})

    def abs(self) -> "FinMeasure":
        return FinMeasure({p: abs(w) for p, w in self._atoms.items()})

    def __add__(self, other: "FinMeasure") -> "FinMeasure":
        out = dict(self._atoms)
        for p, w in other._atoms.items():
            out[p] = out.get(p, Fraction(0)) + w
        return FinMeasure(out)

    def __sub__(self, other: "FinMeasure") -> "FinMeasure":
        return self + other.scale(-1)

    def pushforward(self, table) -> "FinMeasure":
        """Image measure under a map of naturals; PF atoms are not moved."""
        if self.has_pf_atom():
            raise HasPFAtom("pushforward is defined on measures supported in the naturals")
        out = {}
        for p, w in self._atoms.items():
            q = table.apply(p) if hasattr(table, "apply") else table(p)
            if q is None:
                raise UndefinedAt(p)
            q = _check_point(q)
            out[q] = out.get(q, Fraction(0)) + w
        return FinMeasure(out)

    # -------------------------------------------------------------------- json

    def to_jsonable(self):
        return {"atoms": [["PF" if p is PF else p, format_rational(w)]
                          for p, w in self._atoms.items()]}

    @classmethod
    def from_jsonable(cls, obj) -> "FinMeasure":
        if not isinstance(obj, dict) or "atoms" not in obj:
            raise ValidationError("measure object needs an 'atoms' list")
        atoms = {}
        for entry in obj["atoms"]:
            if not isinstance(entry, list) or len(entry) != 2:
                raise ValidationError(f"atom entries are [point, weight], got {entry!r}")
            raw_p, raw_w = entry
            p = PF if raw_p == "PF" else raw_p
            p = _check_point(p)
            w = parse_rational(raw_w)
            if w == 0:
                raise ValidationError(f"zero weight at point {raw_p!r}")
            if p in atoms:
                raise ValidationError(f"duplicate point {raw_p!r}")
            atoms[p] = w
        return cls(atoms)


def combine(ca, a: FinMeasure, cb, b: FinMeasure) -> FinMeasure:
    """ca*a + cb*b with exact cancellation."""
    return a.scale(ca) + b.scale(cb)


def require_omega_nonneg(m: FinMeasure, what: str) -> FinMeasure:
    if m.has_pf_atom():
        raise HasPFAtom(f"{what} needs support in the naturals")
    if not m.is_nonneg():
        raise ValidationError(f"{what} needs a nonnegative measure")
    return m
