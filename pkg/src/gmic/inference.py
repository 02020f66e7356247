"""Monte Carlo null tables, critical values and p-values.

Every statistic in the suite except ``pearson_r2`` and ``dcor`` depends on the
data only through ranks, so one table per (statistic, n) serves any data set of
that size. Tables for several statistics can be built on the same draws.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._parallel import parallel_map, stream
from .baselines import distance_correlation, pearson_r2
from .charmat import MineParams, approx_char_matrix
from .grid import InvalidInputError, Sample, rank_transform
from .measures import gmic, maximal_char_matrix, mcn, mic

TABLE_FORMAT = "gmic-nulltable"
TABLE_VERSION = 1
MIN_REPS = 100
NULL_STREAM = 0

KINDS = ("gmic", "mic", "minic", "mcn", "pearson_r2", "dcor")
MINE_KINDS = ("gmic", "mic", "minic", "mcn")


class TableMismatchError(InvalidInputError):
    pass


def format_p(p):
    if p == math.inf:
        return "inf"
    if p == -math.inf:
        return "-inf"
    p = float(p)
    return str(int(p)) if p.is_integer() and abs(p) < 1e15 else repr(p)


def parse_p(text):
    t = str(text).strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    p = float(t)
    if math.isnan(p):
        raise InvalidInputError("p must not be NaN")
    return p


@dataclass(frozen=True)
class StatisticSpec:
    kind: str
    p: float = None
    delta: float = None
    params: MineParams = field(default_factory=MineParams)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown statistic {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gmic":
            if self.p is None:
                raise InvalidInputError("gmic needs a value of p")
            object.__setattr__(self, "p", parse_p(self.p))
        elif self.p is not None:
            raise InvalidInputError(f"{self.kind} takes no p")
        if self.kind == "mcn":
            delta = 0.05 if self.delta is None else float(self.delta)
            if not 0.0 < delta <= 1.0:
                raise InvalidInputError(f"mcn delta must lie in (0, 1], got {delta}")
            object.__setattr__(self, "delta", delta)
        elif self.delta is not None:
            raise InvalidInputError(f"{self.kind} takes no delta")

    @classmethod
    def parse(cls, text, params=None):
        """Parse ``mic``, ``gmic:-1``, ``gmic(-inf)``, ``mcn:0.05`` and friends."""
        params = params or MineParams()
        m = re.fullmatch(r"\s*([a-z_0-9]+)\s*(?:[:(]\s*([^)]*?)\s*\)?)?\s*", str(text).lower())
        if not m:
            raise InvalidInputError(f"cannot parse statistic {text!r}")
        kind, arg = m.group(1), m.group(2)
        if kind == "gmic":
            return cls("gmic", p=arg, params=params)
        if kind == "mcn":
            return cls("mcn", delta=None if arg in (None, "") else float(arg), params=params)
        if arg not in (None, ""):
            raise InvalidInputError(f"{kind} takes no argument")
        return cls(kind, params=params)

    @property
    def label(self):
        if self.kind == "gmic":
            return f"gmic({format_p(self.p)})"
        if self.kind == "mcn":
            return f"mcn({format_p(self.delta)})"
        return self.kind

    @property
    def rank_based(self):
        return self.kind in MINE_KINDS

    def __call__(self, sample):
        return evaluate([self], sample)[0]


def _mine_value(spec, C, Cstar):
    if spec.kind == "gmic":
        return gmic(Cstar, spec.p)
    if spec.kind == "mic":
        return mic(C)
    if spec.kind == "minic":
        return float(Cstar.values[2, 2])
    return mcn(C, spec.delta)


def evaluate(specs, sample, ys=None):
    """Values of several statistics on one sample, sharing the characteristic matrix."""
    if ys is not None:
        sample = Sample(sample, ys)
    elif not isinstance(sample, Sample):
        sample = Sample(*sample)
    out = []
    ranked = None
    cache = {}
    dcor = None
    for spec in specs:
        if spec.rank_based:
            if spec.params not in cache:
                ranked = ranked or rank_transform(sample)
                C = approx_char_matrix(ranked, spec.params)
                cache[spec.params] = (C, maximal_char_matrix(C))
            out.append(_mine_value(spec, *cache[spec.params]))
        elif spec.kind == "pearson_r2":
            out.append(pearson_r2(sample))
        else:
            dcor = dcor or distance_correlation(sample)
            out.append(dcor.dcor)
    return out


def _uniform_pair(rng, n):
    return rng.random(n), rng.random(n)


@dataclass(frozen=True, eq=False)
class NullTable:
    spec: StatisticSpec
    n: int
    draws: np.ndarray
    seed: int
    marginal: str = "uniform"

    def __post_init__(self):
        d = np.sort(np.asarray(self.draws, dtype=np.float64))
        if d.size < MIN_REPS:
            raise InvalidInputError(f"a null table needs at least {MIN_REPS} draws, got {d.size}")
        d.setflags(write=False)
        object.__setattr__(self, "draws", d)

    @property
    def reps(self):
        return self.draws.size

    def __eq__(self, other):
        if not isinstance(other, NullTable):
            return NotImplemented
        return (self.spec == other.spec and self.n == other.n and self.seed == other.seed
                and self.marginal == other.marginal and np.array_equal(self.draws, other.draws))

    def to_text(self):
        prm = self.spec.params
        head = [
            f"# {TABLE_FORMAT}",
            f"format_version = {TABLE_VERSION}",
            f"statistic = {self.spec.label}",
            f"alpha = {prm.alpha!r}",
            f"clump_factor = {prm.clump_factor}",
            f"bound = {'' if prm.bound is None else prm.bound}",
            f"n = {self.n}",
            f"reps = {self.reps}",
            f"seed = {self.seed}",
            f"marginal = {self.marginal}",
            "---",
        ]
        return "\n".join(head + [repr(float(v)) for v in self.draws]) + "\n"

    def save(self, path):
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text):
        lines = text.splitlines()
        if not lines or lines[0].strip() != f"# {TABLE_FORMAT}":
            raise InvalidInputError("not a null table file")
        try:
            sep = lines.index("---")
        except ValueError:
            raise InvalidInputError("null table header is not terminated by '---'") from None
        header = {}
        for line in lines[1:sep]:
            key, _, value = line.partition("=")
            header[key.strip()] = value.strip()
        version = header.get("format_version")
        if version != str(TABLE_VERSION):
            raise InvalidInputError(f"unsupported null table format version {version!r}")
        try:
            params = MineParams(alpha=float(header["alpha"]),
                                clump_factor=int(header["clump_factor"]),
                                bound=int(header["bound"]) if header.get("bound") else None)
            spec = StatisticSpec.parse(header["statistic"], params)
            draws = np.array([float(v) for v in lines[sep + 1:] if v.strip()])
            table = cls(spec, int(header["n"]), draws, int(header["seed"]),
                        header.get("marginal", "uniform"))
        except KeyError as exc:
            raise InvalidInputError(f"null table header lacks {exc.args[0]!r}") from None
        if table.reps != int(header["reps"]):
            raise InvalidInputError(f"header says {header['reps']} draws, file holds {table.reps}")
        return table

    @classmethod
    def load(cls, path):
        with open(path, encoding="ascii") as fh:
            return cls.from_text(fh.read())


def null_tables(specs, n, reps, seed, threads=1, sampler=None, marginal="uniform", key=()):
    """Null tables for several statistics built on the same Monte Carlo draws.

    Draw ``r`` uses its own generator derived from ``(seed, *key, r)``, so
    results do not depend on ``threads``. ``sampler(rng, n)`` returns an independent
    ``(x, y)`` pair and defaults to two uniform samples.
    """
    specs = list(specs)
    if reps < MIN_REPS:
        raise InvalidInputError(f"reps must be >= {MIN_REPS}, got {reps}")
    if n < 4 and any(s.rank_based for s in specs):
        raise InvalidInputError(f"MINE statistics need n >= 4, got {n}")
    sampler = sampler or _uniform_pair

    def one(r):
        x, y = sampler(stream(seed, NULL_STREAM, *key, r), n)
        return evaluate(specs, Sample(x, y))

    values = np.array(parallel_map(one, range(reps), threads)).reshape(reps, len(specs))
    return [NullTable(s, n, values[:, k], seed, marginal) for k, s in enumerate(specs)]


def null_distribution(spec, n, reps, seed, threads=1):
    return null_tables([spec], n, reps, seed, threads)[0]


def critical_value(table, level=0.05):
    """The ceil((1 - level) * R)-th smallest draw."""
    if not 0.0 < level < 1.0:
        raise InvalidInputError(f"level must lie in (0, 1), got {level}")
    k = math.ceil((1.0 - level) * table.reps - 1e-9)
    k = min(max(k, 1), table.reps)
    return float(table.draws[k - 1])


def p_value(table, observed):
    exceed = table.reps - np.searchsorted(table.draws, observed, side="left")
    return float((1 + exceed) / (table.reps + 1))


@dataclass(frozen=True)
class TestResult:
    observed: float
    critical_value: float
    p_value: float
    reject: bool
    level: float
    statistic: str = ""
    n: int = 0

    __test__ = False


def test_independence(sample, spec, table, level=0.05):
    """Reject independence when the statistic exceeds the table's cutoff."""
    if not isinstance(sample, Sample):
        sample = Sample(*sample)
    if table.n != sample.n:
        raise TableMismatchError(f"null table was built for n={table.n}, sample has n={sample.n}")
    if table.spec != spec:
        raise TableMismatchError(f"null table is for {table.spec.label}, not {spec.label}")
    observed = spec(sample)
    cutoff = critical_value(table, level)
    return TestResult(observed, cutoff, p_value(table, observed), bool(observed > cutoff),
                      level, spec.label, sample.n)


test_independence.__test__ = False
