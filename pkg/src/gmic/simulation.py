"""Power and sample-mean studies over the eight noisy relationships.

Every generated sample draws from its own stream keyed by the seed and the
cell coordinates, so results are reproducible and independent of threading.
"""

import configparser
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import parallel_map, stream
from .charmat import MineParams
from .grid import InvalidInputError, Sample
from .inference import StatisticSpec, critical_value, evaluate, format_p, null_tables, parse_p

RELATIONSHIPS = ("linear", "quadratic", "cubic", "sine_half", "sine_eighth",
                 "fourth_root", "circle", "step")

ALT_STREAM = 1
CELL_NULL_STREAM = 2

POWER_FORMAT = "gmic-power"
MEANS_FORMAT = "gmic-means"
RESULT_VERSION = 1


def relationship_y(rel, x, eps, rng):
    """Response for ``rel`` given design ``x`` and raw noise ``eps``."""
    if rel == "linear":
        return x + eps
    if rel == "quadratic":
        return 4.0 * (x - 0.5) ** 2 + eps
    if rel == "cubic":
        return 80.0 * (x - 1.0 / 3.0) ** 3 - 12.0 * (x - 1.0 / 3.0) + 10.0 * eps
    if rel == "sine_half":
        return np.sin(4.0 * np.pi * x) + 2.0 * eps
    if rel == "sine_eighth":
        return np.sin(16.0 * np.pi * x) + eps
    if rel == "fourth_root":
        return x ** 0.25 + eps
    if rel == "circle":
        w = rng.integers(0, 2, size=x.size)
        return (2.0 * w - 1.0) * np.sqrt(1.0 - (2.0 * x - 1.0) ** 2) + eps / 4.0
    if rel == "step":
        return (x > 0.5).astype(np.float64) + 5.0 * eps
    raise InvalidInputError(f"unknown relationship {rel!r}; expected one of {RELATIONSHIPS}")


def generate(rel, n, sigma, rng):
    """Draw ``n`` points of relationship ``rel`` with noise level ``sigma``."""
    if sigma < 0:
        raise InvalidInputError(f"noise level must be >= 0, got {sigma}")
    if rel not in RELATIONSHIPS:
        raise InvalidInputError(f"unknown relationship {rel!r}; expected one of {RELATIONSHIPS}")
    x = rng.random(n)
    eps = rng.normal(0.0, sigma, size=n) if sigma > 0 else np.zeros(n)
    return Sample(x, relationship_y(rel, x, eps, rng))


def default_noise_grid():
    return [k / 20 for k in range(1, 61)]


def coarse_noise_grid(grid=None):
    """Seven evenly indexed levels of ``grid``."""
    grid = list(grid or default_noise_grid())
    idx = np.linspace(0, len(grid) - 1, 7).round().astype(int)
    return [grid[i] for i in idx]


def means_noise_grid(grid=None):
    """Noise-free level followed by the first ten levels of ``grid``."""
    return [0.0] + list(grid or default_noise_grid())[:10]


def full_p_grid():
    neg = [float(-k) for k in range(100, 0, -1)]
    pos = [float(k) for k in range(1, 101)]
    frac = [k / 100 for k in range(1, 100)]
    return [-math.inf] + neg + [-f for f in reversed(frac)] + frac + pos + [math.inf]


DEFAULT_POWER_STATS = ("mic", "gmic:-1", "minic", "pearson_r2", "dcor")
DEFAULT_MEANS_STATS = ("minic", "gmic:-1", "mic", "dcor", "pearson_r2")


@dataclass(frozen=True)
class SimConfig:
    n: int = 320
    reps: int = 500
    noise_grid: tuple = None
    p_grid: tuple = ()
    relationships: tuple = RELATIONSHIPS
    statistics: tuple = None
    level: float = 0.05
    seed: int = 0
    null_reps: int = None
    params: MineParams = field(default_factory=MineParams)
    study: str = "power"

    def __post_init__(self):
        if self.study not in ("power", "means", "both"):
            raise InvalidInputError(f"study must be power, means or both, got {self.study!r}")
        if self.reps < 10:
            raise InvalidInputError(f"reps must be >= 10, got {self.reps}")
        if self.n < 4:
            raise InvalidInputError(f"n must be >= 4, got {self.n}")
        if not 0.0 < self.level < 1.0:
            raise InvalidInputError(f"level must lie in (0, 1), got {self.level}")
        if self.seed < 0:
            raise InvalidInputError(f"seed must be >= 0, got {self.seed}")
        if self.noise_grid is not None:
            object.__setattr__(self, "noise_grid", tuple(float(s) for s in self.noise_grid))
            if any(s < 0 or not math.isfinite(s) for s in self.noise_grid):
                raise InvalidInputError("noise levels must be finite and >= 0")
        object.__setattr__(self, "p_grid", tuple(parse_p(p) for p in self.p_grid))
        for rel in self.relationships:
            if rel not in RELATIONSHIPS:
                raise InvalidInputError(f"unknown relationship {rel!r}; expected one of {RELATIONSHIPS}")
        object.__setattr__(self, "relationships", tuple(self.relationships))
        if self.statistics is not None:
            object.__setattr__(self, "statistics", tuple(self.statistics))
            self.specs()

    @property
    def null_draws(self):
        return self.null_reps if self.null_reps is not None else max(self.reps, 100)

    def specs(self, study="power"):
        names = self.statistics
        if names is None:
            names = DEFAULT_POWER_STATS if study == "power" else DEFAULT_MEANS_STATS
        out = [StatisticSpec.parse(s, self.params) for s in names]
        out += [StatisticSpec("gmic", p=p, params=self.params) for p in self.p_grid]
        seen, unique = set(), []
        for s in out:
            if s not in seen:
                seen.add(s)
                unique.append(s)
        return unique

    def noise_levels(self, study="power"):
        if self.noise_grid is not None:
            return list(self.noise_grid)
        return default_noise_grid() if study == "power" else means_noise_grid()

    def to_dict(self):
        return {
            "n": self.n,
            "reps": self.reps,
            "null_reps": self.null_draws,
            "seed": self.seed,
            "level": self.level,
            "alpha": self.params.alpha,
            "clump_factor": self.params.clump_factor,
            "bound": self.params.bound,
            "study": self.study,
            "relationships": list(self.relationships),
            "statistics": None if self.statistics is None else list(self.statistics),
            "p_grid": [format_p(p) for p in self.p_grid],
            "noise_grid": None if self.noise_grid is None else list(self.noise_grid),
        }

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(CONFIG_KEYS)
        if unknown:
            raise InvalidInputError(
                f"unknown config keys {sorted(unknown)}; valid keys are {sorted(CONFIG_KEYS)}")
        params = MineParams(alpha=float(d.get("alpha", 0.6)),
                            clump_factor=int(d.get("clump_factor", 15)),
                            bound=None if d.get("bound") in (None, "") else int(d["bound"]))
        kw = {"params": params}
        for key in ("n", "reps", "seed"):
            if key in d:
                kw[key] = int(d[key])
        if d.get("null_reps") is not None:
            kw["null_reps"] = int(d["null_reps"])
        if "level" in d:
            kw["level"] = float(d["level"])
        if "study" in d:
            kw["study"] = d["study"]
        for key in ("relationships", "statistics", "noise_grid"):
            if d.get(key) is not None:
                kw[key] = tuple(d[key])
        if d.get("p_grid"):
            kw["p_grid"] = tuple(d["p_grid"])
        return cls(**kw)


CONFIG_KEYS = ("n", "reps", "null_reps", "seed", "level", "alpha", "clump_factor", "bound",
               "study", "relationships", "statistics", "p_grid", "noise_grid")


def _split(value):
    return [v.strip() for v in value.replace("\n", ",").split(",") if v.strip()]


def parse_config(text):
    """Read a ``key = value`` study description (an optional ``[study]`` header is allowed)."""
    if not text.lstrip().startswith("["):
        text = "[study]\n" + text
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InvalidInputError(f"malformed config: {exc}") from None
    if cp.sections() != ["study"]:
        raise InvalidInputError(f"config must hold a single [study] section, got {cp.sections()}")
    raw = dict(cp["study"])
    d = {}
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise InvalidInputError(
                f"unknown config key {key!r}; valid keys are {', '.join(CONFIG_KEYS)}")
        value = value.strip()
        if key == "relationships":
            d[key] = list(RELATIONSHIPS) if value == "all" else _split(value)
        elif key == "statistics":
            d[key] = _split(value)
        elif key == "p_grid":
            d[key] = [format_p(p) for p in full_p_grid()] if value == "full" else _split(value)
        elif key == "noise_grid":
            presets = {"default": default_noise_grid, "coarse": coarse_noise_grid,
                       "means": means_noise_grid}
            d[key] = presets[value]() if value in presets else [float(v) for v in _split(value)]
        else:
            d[key] = value
    try:
        return SimConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"invalid config value: {exc}") from None


# ------------------------------------------------------------------ results --

def _noise_key(sigma):
    return repr(float(sigma))


@dataclass(frozen=True)
class PowerCell:
    relationship: str
    statistic: str
    noise: float
    power: float
    se: float
    reps: int
    cutoff: float
    status: str = "ok"


@dataclass(frozen=True)
class MeanCell:
    relationship: str
    statistic: str
    noise: float
    mean: float
    se: float
    reps: int
    status: str = "ok"


def _fmt(v):
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def _nan_to_none(v):
    return None if v is None or (isinstance(v, float) and math.isnan(v)) else v


class _Result:
    FORMAT = None
    FIELDS = ()
    VALUE_FIELDS = ()

    def __init__(self, config, cells):
        self.config = config
        self.cells = list(cells)

    @property
    def failed(self):
        return [c for c in self.cells if c.status != "ok"]

    def cell(self, relationship, statistic, noise):
        for c in self.cells:
            if c.relationship == relationship and c.statistic == statistic and c.noise == noise:
                return c
        raise KeyError((relationship, statistic, noise))

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# {self.FORMAT} v{RESULT_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.FIELDS)
        for c in self.cells:
            row = []
            for f in self.FIELDS:
                v = getattr(c, f)
                row.append(_fmt(v) if isinstance(v, float) else v)
            w.writerow(row)
        return buf.getvalue()

    def to_json(self):
        nested = {}
        for c in self.cells:
            slot = nested.setdefault(c.relationship, {}).setdefault(c.statistic, {})
            slot[_noise_key(c.noise)] = {f: _nan_to_none(getattr(c, f)) for f in self.VALUE_FIELDS}
        doc = {"format": self.FORMAT, "version": RESULT_VERSION,
               "config": self.config.to_dict(), "results": nested}
        return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


class PowerResult(_Result):
    FORMAT = POWER_FORMAT
    FIELDS = ("relationship", "statistic", "noise", "power", "se", "reps", "cutoff", "status")
    VALUE_FIELDS = ("power", "se", "reps", "cutoff", "status")


class MeansResult(_Result):
    FORMAT = MEANS_FORMAT
    FIELDS = ("relationship", "statistic", "noise", "mean", "se", "reps", "status")
    VALUE_FIELDS = ("mean", "se", "reps", "status")


def read_result_csv(text):
    """Parse a result CSV back into rows of dicts; rejects unknown formats or versions."""
    first, _, rest = text.partition("\n")
    parts = first.lstrip("# ").split()
    if len(parts) != 2 or parts[0] not in (POWER_FORMAT, MEANS_FORMAT):
        raise InvalidInputError(f"not a study result file: {first!r}")
    if parts[1] != f"v{RESULT_VERSION}":
        raise InvalidInputError(f"unsupported result version {parts[1]!r}")
    return parts[0], list(csv.DictReader(io.StringIO(rest)))


def read_result_json(text):
    doc = json.loads(text)
    if doc.get("format") not in (POWER_FORMAT, MEANS_FORMAT):
        raise InvalidInputError(f"not a study result document: {doc.get('format')!r}")
    if doc.get("version") != RESULT_VERSION:
        raise InvalidInputError(f"unsupported result version {doc.get('version')!r}")
    return doc


# ------------------------------------------------------------------ studies --

def _separate_x_null_sampler(rel, sigma):
    # Y from the relationship on its own design, X drawn separately
    def sampler(rng, n):
        y = generate(rel, n, sigma, rng).ys
        return rng.random(n), y
    return sampler


def _alt_values(config, specs, levels, threads):
    units = [(rel, k, sigma, rep)
             for rel in config.relationships
             for k, sigma in enumerate(levels)
             for rep in range(config.reps)]

    def one(unit):
        rel, k, sigma, rep = unit
        rng = stream(config.seed, ALT_STREAM, RELATIONSHIPS.index(rel), k, rep)
        try:
            return evaluate(specs, generate(rel, config.n, sigma, rng)), None
        except Exception as exc:  # reported per cell
            return None, f"failed: {type(exc).__name__}: {exc}"

    results = parallel_map(one, units, threads)
    out = {}
    for (rel, k, sigma, rep), res in zip(units, results):
        out.setdefault((rel, k, sigma), []).append(res)
    return out


def _cell_values(results, n_specs):
    errors = [err for _, err in results if err]
    if errors:
        return None, errors[0]
    return np.array([v for v, _ in results]).reshape(len(results), n_specs), None


def power_study(config, threads=1, tables=None):
    """Estimated power of every statistic in every (relationship, noise) cell.

    Rank-based statistics share one set of null tables at ``config.n``;
    ``tables`` may pass prebuilt ones keyed by statistic label. Squared
    correlation and distance correlation get a null per cell built the same
    way as the alternative (separate uniform X).
    """
    specs = config.specs("power")
    rank_specs = [s for s in specs if s.rank_based]
    tables = dict(tables or {})
    missing = [s for s in rank_specs
               if not (s.label in tables and tables[s.label].spec == s
                       and tables[s.label].n == config.n)]
    if missing:
        built = null_tables(missing, config.n, config.null_draws, config.seed, threads)
        tables.update({t.spec.label: t for t in built})
    cutoffs = {s.label: critical_value(tables[s.label], config.level) for s in rank_specs}

    alt = _alt_values(config, specs, config.noise_levels("power"), threads)
    other = [s for s in specs if not s.rank_based]
    cells = []
    for (rel, k, sigma), results in alt.items():
        values, err = _cell_values(results, len(specs))
        cell_cut = dict(cutoffs)
        if other and err is None:
            try:
                nt = null_tables(other, config.n, config.null_draws, config.seed, threads,
                                 sampler=_separate_x_null_sampler(rel, sigma),
                                 key=(CELL_NULL_STREAM, RELATIONSHIPS.index(rel), k),
                                 marginal=f"{rel}@{sigma!r}")
                cell_cut.update({t.spec.label: critical_value(t, config.level) for t in nt})
            except Exception as exc:
                err = f"failed: {type(exc).__name__}: {exc}"
        for idx, s in enumerate(specs):
            if err:
                cells.append(PowerCell(rel, s.label, sigma, math.nan, math.nan,
                                       config.reps, math.nan, err))
                continue
            power = float(np.mean(values[:, idx] > cell_cut[s.label]))
            se = math.sqrt(power * (1.0 - power) / config.reps)
            cells.append(PowerCell(rel, s.label, sigma, power, se, config.reps, cell_cut[s.label]))
    return PowerResult(config, cells)


def sample_mean_study(config, threads=1):
    """Mean and standard error of each statistic's raw value per cell."""
    specs = config.specs("means")
    alt = _alt_values(config, specs, config.noise_levels("means"), threads)
    cells = []
    for (rel, k, sigma), results in alt.items():
        values, err = _cell_values(results, len(specs))
        for idx, s in enumerate(specs):
            if err:
                cells.append(MeanCell(rel, s.label, sigma, math.nan, math.nan, config.reps, err))
                continue
            col = values[:, idx]
            se = float(np.std(col, ddof=1) / math.sqrt(col.size))
            cells.append(MeanCell(rel, s.label, sigma, float(np.mean(col)), se, config.reps))
    return MeansResult(config, cells)
