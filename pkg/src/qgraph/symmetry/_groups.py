"""
Finite groups given by multiplication tables, and their +-1 representations.

Elements are referred to by string ids. `table[a][b]` is the product a * b,
where b acts first when the group acts on a graph.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from qgraph._errors import GroupValidationError, RepresentationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """
    A finite group defined by its multiplication table.

    Construction validates the group axioms exhaustively (closure, identity,
    unique inverses as a Latin square, associativity over all triples) and
    raises GroupValidationError on failure.

    Example:
        >>> z2 = FiniteGroup(("e", "r"), (("e", "r"), ("r", "e")))
        >>> z2.inverse("r")
        'r'
    """

    elements: tuple[str, ...]
    table: tuple[tuple[str, ...], ...]
    name: str = ""
    _indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "table", tuple(tuple(row) for row in self.table))
        n = len(self.elements)
        if n == 0:
            raise GroupValidationError("a group needs at least one element")
        if len(set(self.elements)) != n:
            raise GroupValidationError(f"duplicate group elements in {list(self.elements)}")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupValidationError(f"multiplication table must be {n}x{n}")

        index = {el: i for i, el in enumerate(self.elements)}
        try:
            indices = np.array([[index[x] for x in row] for row in self.table], dtype=int)
        except KeyError as e:
            raise GroupValidationError(f"multiplication table contains unknown element {e.args[0]!r}") from None
        object.__setattr__(self, "_indices", indices)

        expected = np.arange(n)
        for i in range(n):
            if not (np.array_equal(np.sort(indices[i]), expected) and np.array_equal(np.sort(indices[:, i]), expected)):
                raise GroupValidationError(
                    f"row or column of {self.elements[i]!r} is not a permutation (inverses are not unique)"
                )
        identities = [i for i in range(n) if np.array_equal(indices[i], expected)
                      and np.array_equal(indices[:, i], expected)]
        if not identities:
            raise GroupValidationError("multiplication table has no identity element")

        # (a*b)*c == a*(b*c) for all triples at once
        left = indices[indices]
        right = indices[expected[:, None, None], indices[None, :, :]]
        if not np.array_equal(left, right):
            a, b, c = (int(v[0]) for v in np.nonzero(left != right))
            raise GroupValidationError(
                f"multiplication is not associative: ({self.elements[a]}*{self.elements[b]})*{self.elements[c]} "
                f"!= {self.elements[a]}*({self.elements[b]}*{self.elements[c]})"
            )

    @classmethod
    def from_func(cls, elements: Sequence[str], mult: Callable[[str, str], str], name: str = "") -> FiniteGroup:
        """Build the table by evaluating mult(a, b) for every pair."""
        table = tuple(tuple(mult(a, b) for b in elements) for a in elements)
        return cls(tuple(elements), table, name=name)

    @cached_property
    def index(self) -> dict[str, int]:
        return {el: i for i, el in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def identity(self) -> str:
        expected = np.arange(self.order)
        return next(self.elements[i] for i in range(self.order) if np.array_equal(self._indices[i], expected))

    def require_element(self, element: str) -> None:
        if element not in self.index:
            raise GroupValidationError(f"unknown group element {element!r}")

    def multiply(self, a: str, b: str) -> str:
        return self.elements[self._indices[self.index[a], self.index[b]]]

    def product(self, *factors: str) -> str:
        result = self.identity
        for factor in factors:
            result = self.multiply(result, factor)
        return result

    def inverse(self, a: str) -> str:
        row = self._indices[self.index[a]]
        return self.elements[int(np.nonzero(row == self.index[self.identity])[0][0])]

    def conjugate(self, g: str, x: str) -> str:
        """x^-1 * g * x."""
        return self.product(self.inverse(x), g, x)

    def element_order(self, a: str) -> int:
        n, power = 1, a
        while power != self.identity:
            power = self.multiply(power, a)
            n += 1
        return n

    def same_as(self, other: FiniteGroup) -> bool:
        return self is other or (self.elements == other.elements and self.table == other.table)

    def is_subgroup(self, subset: Iterable[str]) -> bool:
        """A nonempty subset closed under multiplication (finite, hence a subgroup)."""
        members = set(subset)
        if not members or not members <= set(self.elements):
            return False
        return all(self.multiply(a, b) in members for a in members for b in members)

    def require_subgroup(self, subset: Iterable[str]) -> tuple[str, ...]:
        """Return the subset in group order, raising GroupValidationError if it is not a subgroup."""
        members = set(subset)
        unknown = members - set(self.elements)
        if unknown:
            raise GroupValidationError(f"subgroup contains unknown elements {sorted(unknown)}")
        if not self.is_subgroup(members):
            raise GroupValidationError(f"{sorted(members)} is not a subgroup (not closed under multiplication)")
        return tuple(el for el in self.elements if el in members)

    def generated(self, generators: Iterable[str]) -> tuple[str, ...]:
        """The subgroup generated by the given elements, in group order."""
        members = {self.identity}
        frontier = list(members)
        gens = list(generators)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.multiply(x, g)
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return tuple(el for el in self.elements if el in members)

    def left_cosets(self, subgroup: Iterable[str]) -> list[tuple[str, ...]]:
        """Left cosets xH in group order; each coset's first element is its representative."""
        members = self.require_subgroup(subgroup)
        seen: set[str] = set()
        cosets = []
        for x in self.elements:
            if x in seen:
                continue
            coset = {self.multiply(x, h) for h in members}
            seen |= coset
            cosets.append(tuple(el for el in self.elements if el in coset))
        return cosets

    def right_cosets(self, subgroup: Iterable[str]) -> list[tuple[str, ...]]:
        """Right cosets Hx in group order; each coset's first element is its representative."""
        members = self.require_subgroup(subgroup)
        seen: set[str] = set()
        cosets = []
        for x in self.elements:
            if x in seen:
                continue
            coset = {self.multiply(h, x) for h in members}
            seen |= coset
            cosets.append(tuple(el for el in self.elements if el in coset))
        return cosets


@dataclass(frozen=True, eq=False)
class Rep1D:
    """
    A +-1 valued one-dimensional representation of a subgroup.

    Attributes:
        group: The ambient group.
        values: Element -> +1 or -1, defined exactly on the subgroup.
        name: Label used in reports and file names.

    Raises:
        RepresentationError: Non +-1 values, value(identity) != +1, or value(g*h) != value(g)*value(h).
        GroupValidationError: The domain is not a subgroup.

    Example:
        >>> rep = Rep1D(d4, {"e": 1, "ru": 1, "rv": -1, "s2": -1}, name="R1")
        >>> rep("rv")
        -1
    """

    group: FiniteGroup
    values: Mapping[str, int]
    name: str = ""

    def __post_init__(self) -> None:
        values = dict(self.values)
        for el, value in values.items():
            if isinstance(value, bool) or value not in (1, -1):
                raise RepresentationError(f"representation values must be +1 or -1, got {value!r} for {el!r}")
        unknown = set(values) - set(self.group.elements)
        if unknown:
            raise RepresentationError(f"representation is defined on unknown elements {sorted(unknown)}")
        subgroup = self.group.require_subgroup(values)
        object.__setattr__(self, "values", {el: int(values[el]) for el in subgroup})

        if self.values[self.group.identity] != 1:
            raise RepresentationError("representation must map the identity to +1")
        for a, b in itertools.product(subgroup, repeat=2):
            ab = self.group.multiply(a, b)
            if self.values[ab] != self.values[a] * self.values[b]:
                raise RepresentationError(
                    f"representation is not multiplicative: value({a}*{b} = {ab}) = {self.values[ab]} "
                    f"!= {self.values[a]} * {self.values[b]}"
                )

    @classmethod
    def trivial(cls, group: FiniteGroup, subgroup: Iterable[str] | None = None, name: str = "trivial") -> Rep1D:
        members = group.elements if subgroup is None else group.require_subgroup(subgroup)
        return cls(group, dict.fromkeys(members, 1), name=name)

    def __call__(self, element: str) -> int:
        try:
            return self.values[element]
        except KeyError:
            raise RepresentationError(f"{element!r} is not in the subgroup of {self.name or 'the representation'}") from None

    @property
    def subgroup(self) -> tuple[str, ...]:
        return tuple(self.values)

    @property
    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.values.values())

    def is_trivial_on(self, elements: Iterable[str]) -> bool:
        """True if every listed element maps to +1."""
        return all(self(el) == 1 for el in elements)

    def describe(self) -> str:
        values = ", ".join(f"{el}: {'+1' if v > 0 else '-1'}" for el, v in self.values.items())
        return f"{self.name or 'rep'} {{{values}}}"


def induced_character(group: FiniteGroup, rep: Rep1D) -> dict[str, int]:
    """
    Character of the representation of `group` induced from `rep`.

    chi(g) = sum over left coset representatives x with x^-1 g x in H of rep(x^-1 g x).

    Example:
        >>> induced_character(d4, r1)
        {'e': 2, 's': 0, 's2': -2, 's3': 0, 'rx': 0, 'ry': 0, 'ru': 0, 'rv': 0}
    """
    if not rep.group.same_as(group):
        raise GroupValidationError("representation is defined on a different group")
    members = set(rep.subgroup)
    representatives = [coset[0] for coset in group.left_cosets(rep.subgroup)]
    character = {}
    for g in group.elements:
        total = 0
        for x in representatives:
            conjugated = group.conjugate(g, x)
            if conjugated in members:
                total += rep(conjugated)
        character[g] = total
    return character


def induction_equivalent(group: FiniteGroup, rep1: Rep1D, rep2: Rep1D) -> bool:
    """True iff the induced representations have equal characters (hence are equivalent)."""
    return induced_character(group, rep1) == induced_character(group, rep2)


def sunada_equivalent(group: FiniteGroup, subgroup1: Iterable[str], subgroup2: Iterable[str]) -> bool:
    """Induction equivalence of the trivial representations of two subgroups."""
    return induction_equivalent(group, Rep1D.trivial(group, subgroup1), Rep1D.trivial(group, subgroup2))


def _generators(group: FiniteGroup, subgroup: Sequence[str]) -> list[str]:
    gens: list[str] = []
    span = set(group.generated(gens))
    for el in subgroup:
        if el not in span:
            gens.append(el)
            span = set(group.generated(gens))
    return gens


def one_dim_reps(group: FiniteGroup, subgroup: Iterable[str] | None = None) -> list[Rep1D]:
    """
    All +-1 representations of a subgroup (the whole group by default), trivial first.

    Signs are assigned to a greedy generating set and propagated by closure;
    assignments that are not homomorphisms are skipped.

    Example:
        >>> len(one_dim_reps(d4, ["e", "rx", "ry", "s2"]))
        4
    """
    members = group.elements if subgroup is None else group.require_subgroup(subgroup)
    gens = _generators(group, members)
    reps: list[Rep1D] = []
    for signs in itertools.product((1, -1), repeat=len(gens)):
        values = {group.identity: 1}
        frontier = [group.identity]
        consistent = True
        while frontier and consistent:
            x = frontier.pop()
            for g, s in zip(gens, signs, strict=True):
                y = group.multiply(x, g)
                value = values[x] * s
                if y not in values:
                    values[y] = value
                    frontier.append(y)
                elif values[y] != value:
                    consistent = False
                    break
        if not consistent:
            continue
        label = ",".join(f"{g}{'+' if s > 0 else '-'}" for g, s in zip(gens, signs, strict=True))
        try:
            reps.append(Rep1D(group, values, name=f"chi[{label}]" if gens else "trivial"))
        except RepresentationError:
            logger.debug(f"{'Representations'[:26]:<26} | SYM  | skipped non-homomorphic signs {label}")
    return reps
