"""Allele frequency tables, STR profiles, and their ingestion/validation.

Frequency CSV schema (UTF-8, header row)::

    subpop,locus,allele,freq

one row per (subpop, locus, allele). A companion metadata file (plain
``key = value`` text, ``#`` comments allowed) carries the subpopulation
names, mixing proportions, optional sample sizes, the panel locus order,
and the frequency floor::

    subpops      = North, Northeast, Central, South
    proportions  = 0.1108, 0.3695, 0.3538, 0.1659
    sample_sizes = 202, 304, 212, 211
    panel        = FGA, TH01, TPOX
    floor        = 1e-5

Profile CSV schema: ``locus,allele1,allele2`` per row.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, TextIO, Union

from .errors import (
    DuplicateAllele,
    MalformedRow,
    MissingLocusForSubpop,
    MissingSampleSizes,
    NonPositiveFrequency,
    PanelMismatch,
    ProportionSumOutOfTolerance,
)

DEFAULT_FLOOR = 1e-5
PROPORTION_TOL = 1e-4
FREQ_SUM_TOL = 1e-6

# An allele is an opaque string token; STR nomenclature includes
# microvariants such as "9.3", so labels are never parsed as numbers.
Allele = str


@dataclass(frozen=True, order=True)
class LocusGenotype:
    """Unordered genotype at one locus, stored in canonical sorted order."""

    locus: str
    alleles: tuple[Allele, Allele]

    def __post_init__(self):
        a, b = self.alleles
        if not a or not b:
            raise MalformedRow(f"empty allele label at locus {self.locus!r}")
        if a > b:
            object.__setattr__(self, "alleles", (b, a))

    @property
    def is_homozygote(self) -> bool:
        return self.alleles[0] == self.alleles[1]


@dataclass(frozen=True)
class Profile:
    """A multi-locus genotype; loci must be distinct."""

    genotypes: tuple[LocusGenotype, ...]

    def __post_init__(self):
        loci = [g.locus for g in self.genotypes]
        if len(set(loci)) != len(loci):
            raise MalformedRow("profile contains duplicate loci")

    @property
    def loci(self) -> tuple[str, ...]:
        return tuple(g.locus for g in self.genotypes)

    def genotype(self, locus: str) -> LocusGenotype:
        for g in self.genotypes:
            if g.locus == locus:
                return g
        raise PanelMismatch(f"profile has no genotype for locus {locus!r}")


@dataclass(frozen=True)
class Subpopulation:
    name: str
    proportion: float
    sample_size: Optional[int] = None

    def __post_init__(self):
        if not (0.0 < self.proportion <= 1.0):
            raise ProportionSumOutOfTolerance(
                f"subpop {self.name!r} proportion {self.proportion} not in (0, 1]"
            )


@dataclass(frozen=True)
class FrequencyTable:
    """Validated, floored, renormalized per-subpopulation allele frequencies.

    Immutable after construction; safe for shared read access from any
    number of concurrent workers.
    """

    panel: tuple[str, ...]
    subpops: tuple[Subpopulation, ...]
    freqs: Mapping[str, Mapping[str, Mapping[Allele, float]]]  # subpop -> locus -> allele -> freq
    floor: float = DEFAULT_FLOOR

    @property
    def n_subpops(self) -> int:
        return len(self.subpops)

    @property
    def n_loci(self) -> int:
        return len(self.panel)

    @property
    def proportions(self) -> tuple[float, ...]:
        return tuple(s.proportion for s in self.subpops)

    @property
    def sample_sizes(self) -> Optional[tuple[int, ...]]:
        sizes = tuple(s.sample_size for s in self.subpops)
        if any(n is None for n in sizes):
            return None
        return sizes

    def locus_freqs(self, subpop: str) -> Mapping[str, Mapping[Allele, float]]:
        """Per-locus allele distributions for one subpopulation."""
        return self.freqs[subpop]

    def alleles(self, locus: str) -> tuple[Allele, ...]:
        """Union allele support of a locus, in sorted label order."""
        labels: set[Allele] = set()
        for sp in self.subpops:
            labels.update(self.freqs[sp.name][locus])
        return tuple(sorted(labels))


@dataclass
class TableMeta:
    """Companion metadata for a frequency CSV."""

    subpops: Optional[list[str]] = None
    proportions: Optional[list[float]] = None
    sample_sizes: Optional[list[int]] = None
    panel: Optional[list[str]] = None
    floor: Optional[float] = None
    extra: dict = field(default_factory=dict)


def _as_stream(source: Union[str, TextIO]) -> TextIO:
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def load_table_meta(source: Union[str, TextIO]) -> TableMeta:
    """Parse a ``key = value`` metadata file."""
    meta = TableMeta()
    for lineno, raw in enumerate(_as_stream(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedRow(f"metadata line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        items = [tok.strip() for tok in value.split(",") if tok.strip()]
        try:
            if key == "subpops":
                meta.subpops = items
            elif key == "proportions":
                meta.proportions = [float(tok) for tok in items]
            elif key == "sample_sizes":
                meta.sample_sizes = [int(tok) for tok in items]
            elif key == "panel":
                meta.panel = items
            elif key == "floor":
                meta.floor = float(value)
            else:
                meta.extra[key] = value
        except ValueError as exc:
            raise MalformedRow(f"metadata line {lineno}: {exc}") from exc
    return meta


def dump_table_meta(table: FrequencyTable) -> str:
    lines = [
        "subpops = " + ", ".join(s.name for s in table.subpops),
        "proportions = " + ", ".join(repr(s.proportion) for s in table.subpops),
    ]
    if table.sample_sizes is not None:
        lines.append("sample_sizes = " + ", ".join(str(n) for n in table.sample_sizes))
    lines.append("panel = " + ", ".join(table.panel))
    lines.append(f"floor = {table.floor!r}")
    return "\n".join(lines) + "\n"


def _floor_and_normalize(dist: dict[Allele, float], floor: float) -> dict[Allele, float]:
    raised = {a: max(f, floor) for a, f in dist.items()}
    total = sum(raised.values())
    return {a: f / total for a, f in raised.items()}


def load_frequency_table(
    source: Union[str, TextIO],
    meta: Optional[TableMeta] = None,
    floor: Optional[float] = None,
) -> FrequencyTable:
    """Load and validate a frequency CSV.

    Frequencies below the floor (including alleles entirely absent from a
    subpopulation but present in another at the same locus) are raised to
    the floor and the per-(subpop, locus) distribution renormalized.
    Proportions are renormalized to sum exactly to 1 if they are within
    1e-4, otherwise :class:`ProportionSumOutOfTolerance` is raised.
    """
    if meta is None:
        meta = TableMeta()
    if floor is None:
        floor = meta.floor if meta.floor is not None else DEFAULT_FLOOR
    if floor <= 0.0:
        raise NonPositiveFrequency(f"floor must be > 0, got {floor}")

    reader = csv.reader(_as_stream(source))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["subpop", "locus", "allele", "freq"]:
        raise MalformedRow(f"expected header 'subpop,locus,allele,freq', got {header}")

    raw: dict[str, dict[str, dict[Allele, float]]] = {}
    subpop_order: list[str] = []
    locus_order: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise MalformedRow(f"line {lineno}: expected 4 columns, got {len(row)}")
        subpop, locus, allele, freq_s = (tok.strip() for tok in row)
        if not subpop or not locus or not allele:
            raise MalformedRow(f"line {lineno}: empty field")
        try:
            freq = float(freq_s)
        except ValueError as exc:
            raise MalformedRow(f"line {lineno}: bad frequency {freq_s!r}") from exc
        if freq < 0.0:
            raise NonPositiveFrequency(f"line {lineno}: negative frequency {freq}")
        if subpop not in raw:
            raw[subpop] = {}
            subpop_order.append(subpop)
        by_locus = raw[subpop]
        if locus not in by_locus:
            by_locus[locus] = {}
            if locus not in locus_order:
                locus_order.append(locus)
        if allele in by_locus[locus]:
            raise DuplicateAllele(f"line {lineno}: duplicate allele {allele!r} for "
                                  f"({subpop!r}, {locus!r})")
        by_locus[locus][allele] = freq

    if not raw:
        raise MalformedRow("frequency CSV contains no data rows")

    subpop_names = meta.subpops if meta.subpops is not None else subpop_order
    panel = tuple(meta.panel) if meta.panel is not None else tuple(locus_order)
    for name in subpop_names:
        if name not in raw:
            raise MissingLocusForSubpop(f"subpop {name!r} absent from frequency CSV")
        for locus in panel:
            if locus not in raw[name]:
                raise MissingLocusForSubpop(f"subpop {name!r} missing locus {locus!r}")

    K = len(subpop_names)
    if meta.proportions is not None:
        if len(meta.proportions) != K:
            raise ProportionSumOutOfTolerance(
                f"{len(meta.proportions)} proportions for {K} subpops")
        props = list(meta.proportions)
    else:
        props = [1.0 / K] * K
    total = sum(props)
    if abs(total - 1.0) > PROPORTION_TOL:
        raise ProportionSumOutOfTolerance(
            f"proportions sum to {total}, outside tolerance {PROPORTION_TOL}")
    props = [p / total for p in props]

    sizes: Sequence[Optional[int]]
    if meta.sample_sizes is not None:
        if len(meta.sample_sizes) != K:
            raise MissingSampleSizes(f"{len(meta.sample_sizes)} sample sizes for {K} subpops")
        sizes = meta.sample_sizes
    else:
        sizes = [None] * K

    # Floor over the union support so every allele seen anywhere at a locus
    # gets positive frequency in every subpopulation.
    union: dict[str, set[Allele]] = {
        locus: set().union(*(raw[name][locus].keys() for name in subpop_names))
        for locus in panel
    }
    freqs: dict[str, dict[str, dict[Allele, float]]] = {}
    for name in subpop_names:
        freqs[name] = {}
        for locus in panel:
            dist = {a: raw[name][locus].get(a, 0.0) for a in union[locus]}
            freqs[name][locus] = _floor_and_normalize(dist, floor)

    subpops = tuple(
        Subpopulation(name, p, n) for name, p, n in zip(subpop_names, props, sizes)
    )
    return FrequencyTable(panel=panel, subpops=subpops, freqs=freqs, floor=floor)


def dump_frequency_table(table: FrequencyTable) -> str:
    """Serialize to the frequency CSV schema (round-trips through load)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["subpop", "locus", "allele", "freq"])
    for sp in table.subpops:
        for locus in table.panel:
            dist = table.freqs[sp.name][locus]
            for allele in sorted(dist):
                writer.writerow([sp.name, locus, allele, repr(dist[allele])])
    return out.getvalue()


def _pool(table: FrequencyTable, weights: Sequence[float], name: str) -> FrequencyTable:
    total = float(sum(weights))
    w = [x / total for x in weights]
    freqs: dict[str, dict[str, dict[Allele, float]]] = {name: {}}
    for locus in table.panel:
        merged: dict[Allele, float] = {}
        for wk, sp in zip(w, table.subpops):
            for allele, f in table.freqs[sp.name][locus].items():
                merged[allele] = merged.get(allele, 0.0) + wk * f
        freqs[name][locus] = merged
    subpop = Subpopulation(name, 1.0)
    return FrequencyTable(panel=table.panel, subpops=(subpop,), freqs=freqs,
                          floor=table.floor)


def local_average(table: FrequencyTable) -> FrequencyTable:
    """Proportion-weighted average of the subpopulation frequencies."""
    return _pool(table, table.proportions, "local")


def pooled_frequencies(table: FrequencyTable, weights: str = "auto") -> FrequencyTable:
    """Pool all subpopulations into one homogeneous frequency set.

    ``weights`` is one of ``census`` (mixing proportions), ``samples``
    (per-subpop sample sizes), ``equal``, or ``auto`` (samples when the
    table carries them, else equal).
    """
    if weights == "auto":
        weights = "samples" if table.sample_sizes is not None else "equal"
    if weights == "census":
        w: Sequence[float] = table.proportions
    elif weights == "samples":
        sizes = table.sample_sizes
        if sizes is None:
            raise MissingSampleSizes("table carries no per-subpop sample sizes")
        w = [float(n) for n in sizes]
    elif weights == "equal":
        w = [1.0] * table.n_subpops
    else:
        raise ValueError(f"unknown weight scheme {weights!r}")
    return _pool(table, w, "pooled")


def load_profile_csv(source: Union[str, TextIO]) -> Profile:
    """Read a ``locus,allele1,allele2`` CSV into a Profile."""
    reader = csv.reader(_as_stream(source))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["locus", "allele1", "allele2"]:
        raise MalformedRow(f"expected header 'locus,allele1,allele2', got {header}")
    genotypes = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise MalformedRow(f"line {lineno}: expected 3 columns, got {len(row)}")
        locus, a, b = (tok.strip() for tok in row)
        genotypes.append(LocusGenotype(locus, (a, b)))
    return Profile(tuple(genotypes))


def dump_profile_csv(profile: Profile) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["locus", "allele1", "allele2"])
    for g in profile.genotypes:
        writer.writerow([g.locus, g.alleles[0], g.alleles[1]])
    return out.getvalue()
