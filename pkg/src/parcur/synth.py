"""Seeded generators for synthetic overparameterized (FOP) datasets.

Every dataset is built from a list of :class:`ColumnSpec` entries. Polynomial
columns are exact polynomials of ``y`` on ``[-1, 1]``; non-functional columns
come from two fixed shapes:

* ``nonfunc_curve``: a sample of the multivalued inverse of the cubic
  ``y = (x**3 - 3 x) / 2`` on ``x in [-2, 2]`` (three branches, one picked at
  random per row), rescaled by 1/2 to unit amplitude.
* ``nonfunc_cone``: one coordinate of a point on the cone
  ``x1**2 + x2**2 = radius(y)**2`` with ``radius(y) = 0.5 (y + 1)`` (apex at
  ``y = -1``) and a uniformly random azimuth per row.
"""

import configparser
from dataclasses import dataclass, field, replace
from io import StringIO
from pathlib import Path

import numpy as np

from .dataset import DataSet
from .exceptions import ConfigError

CONE_APEX = -1.0
CONE_SLOPE = 0.5
CURVE_HALF_WIDTH = 2.0
MANIFEST_FORMAT = "parcur-manifest"
MANIFEST_VERSION = 1

POLY_KINDS = ("polynomial", "high_degree_polynomial")
NONFUNC_KINDS = ("nonfunc_curve", "nonfunc_cone")
_AMPLITUDE_GRID = np.linspace(-1.0, 1.0, 4001)


@dataclass(frozen=True)
class ColumnSpec:
    """One predictor column.

    ``coefficients`` (ascending powers, length ``degree + 1``) are drawn
    uniform(-1, 1) and rescaled to unit max amplitude when omitted.
    ``component`` picks ``x1`` (0) or ``x2`` (1) of the cone.
    """

    kind: str = "polynomial"
    degree: int = 1
    coefficients: tuple = None
    noise_sigma: float = 0.0
    component: int = 0

    def __post_init__(self):
        if self.kind not in POLY_KINDS + NONFUNC_KINDS:
            raise ConfigError(f"unknown column kind {self.kind!r}")
        if self.kind in POLY_KINDS:
            if self.degree < 0:
                raise ConfigError("polynomial degree must be non-negative")
            if self.coefficients is not None and len(self.coefficients) != self.degree + 1:
                raise ConfigError(
                    f"{len(self.coefficients)} coefficients for degree {self.degree}"
                )
        if not (np.isfinite(self.noise_sigma) and self.noise_sigma >= 0):
            raise ConfigError("noise_sigma must be finite and non-negative")
        if self.component not in (0, 1):
            raise ConfigError("cone component must be 0 or 1")


NOISE_REGIMES = ("y_only", "iid_all", "structured")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise.

    ``regime`` is ``"y_only"``, ``"iid_all"`` or ``"structured"`` (``y`` plus
    a ``noisy_column_fraction`` share of predictor columns).
    """

    regime: str = "y_only"
    sigma: float = 0.0
    noisy_column_fraction: float = 1.0 / 3.0

    def __post_init__(self):
        if self.regime not in NOISE_REGIMES:
            raise ConfigError(f"unknown noise regime {self.regime!r}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ConfigError("sigma must be finite and non-negative")
        if not 0.0 <= self.noisy_column_fraction <= 1.0:
            raise ConfigError("noisy_column_fraction must lie in [0, 1]")


@dataclass(eq=False)
class GeneratorManifest:
    """Ground truth recorded by :func:`generate_fop`."""

    seed: int
    n_train: int
    n_test: int
    kinds: list
    degrees: list
    coefficients: list
    q: int
    permutation: np.ndarray
    column_ids: tuple
    noise: NoiseSpec = None
    noisy_columns: tuple = ()
    exact_train: DataSet = field(default=None, repr=False)
    exact_test: DataSet = field(default=None, repr=False)

    @property
    def improper_columns(self):
        """Indices of columns that are non-functional, high-degree or noisy."""
        bad = {j for j, k in enumerate(self.kinds) if k != "polynomial"}
        return tuple(sorted(bad | set(self.noisy_columns)))

    @property
    def nonfunctional_columns(self):
        return tuple(j for j, k in enumerate(self.kinds) if k in NONFUNC_KINDS)

    def coefficient_matrix(self):
        """Monomial coefficients of all polynomial columns, ``(max_deg+1) x p``.

        Non-functional columns are left as NaN.
        """
        width = max([len(c) for c in self.coefficients if c is not None] + [2])
        out = np.full((width, len(self.kinds)), np.nan)
        for j, c in enumerate(self.coefficients):
            if c is not None:
                out[:, j] = 0.0
                out[: len(c), j] = c
        return out

    def to_text(self):
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        noise = self.noise
        cp["manifest"] = {
            "format": MANIFEST_FORMAT,
            "version": str(MANIFEST_VERSION),
            "seed": str(self.seed),
            "n_train": str(self.n_train),
            "n_test": str(self.n_test),
            "p": str(len(self.kinds)),
            "q": str(self.q),
            "permutation": " ".join(str(int(v)) for v in self.permutation),
            "noise_regime": noise.regime if noise else "none",
            "noise_sigma": f"{noise.sigma:.17g}" if noise else "0",
            "noisy_column_fraction": f"{noise.noisy_column_fraction:.17g}" if noise else "0",
            "noisy_columns": " ".join(str(j) for j in self.noisy_columns),
            "curve": "y = (x^3 - 3x)/2 on x in [-2,2], column = x/2, branch uniform per row",
            "cone": f"radius(y) = {CONE_SLOPE} * (y - ({CONE_APEX})), azimuth uniform per row",
        }
        cp["columns"] = {}
        for j, cid in enumerate(self.column_ids):
            coef = self.coefficients[j]
            desc = f"{self.kinds[j]} degree={self.degrees[j]}"
            if coef is not None:
                desc += " coefficients=" + " ".join(f"{c:.17g}" for c in coef)
            cp["columns"][cid] = desc
        buf = StringIO()
        cp.write(buf)
        return buf.getvalue()

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")
        return path


def _distinct_uniform(rng, size, lo=-1.0, hi=1.0, tol=1e-12):
    y = rng.uniform(lo, hi, size)
    while True:
        order = np.argsort(y)
        dup = np.flatnonzero(np.diff(y[order]) <= tol)
        if dup.size == 0:
            return y
        y[order[dup + 1]] = rng.uniform(lo, hi, dup.size)


def _unit_amplitude_coefficients(rng, degree):
    c = rng.uniform(-1.0, 1.0, degree + 1)
    amp = np.max(np.abs(np.polynomial.polynomial.polyval(_AMPLITUDE_GRID, c)))
    return c / amp


def curve_branches(y):
    """The three preimages ``x`` of ``y = (x**3 - 3x)/2``, shape ``(len(y), 3)``."""
    theta = np.arccos(np.clip(np.asarray(y, dtype=float), -1.0, 1.0))
    k = np.arange(3)
    return 2.0 * np.cos((theta[:, None] + 2.0 * np.pi * k) / 3.0)


def cone_radius(y):
    return CONE_SLOPE * (np.asarray(y, dtype=float) - CONE_APEX)


def nonfunc_samples(kind, y, seed):
    """Sample non-functional predictor data at parameter values ``y``.

    Returns a vector for ``kind="curve"`` and an ``n x 2`` array ``(x1, x2)``
    for ``kind="cone"``.
    """
    rng = np.random.default_rng(seed)
    y = np.asarray(y, dtype=float)
    if kind in ("curve", "nonfunc_curve"):
        branch = rng.integers(0, 3, y.shape[0])
        x = curve_branches(y)[np.arange(y.shape[0]), branch]
        return x / CURVE_HALF_WIDTH
    if kind in ("cone", "nonfunc_cone"):
        phi = rng.uniform(0.0, 2.0 * np.pi, y.shape[0])
        rad = cone_radius(y)
        return np.column_stack([rad * np.cos(phi), rad * np.sin(phi)])
    raise ConfigError(f"unknown non-functional kind {kind!r}")


def _coefficient_rank(coefs):
    width = max(len(c) for c in coefs)
    M = np.zeros((width, len(coefs)))
    for j, c in enumerate(coefs):
        M[: len(c), j] = c
    return int(np.linalg.matrix_rank(M))


def generate_fop(specs, n_train, n_test, seed, noise=None, shuffle_columns=False):
    """Generate a training and a test set from column specifications.

    ``y`` is drawn uniform on ``[-1, 1]`` (distinct values) and every column
    evaluated at it. With ``noise`` given (or per-column ``noise_sigma``),
    the exact data stay on the manifest and the returned sets carry noise.

    Returns
    -------
    train, test : DataSet
        ``test`` has zero rows when ``n_test == 0``.
    manifest : GeneratorManifest
    """
    specs = list(specs)
    if not specs:
        raise ConfigError("at least one column spec is required")
    if not any(s.kind in POLY_KINDS and s.degree >= 1 for s in specs):
        raise ConfigError("at least one polynomial column of degree >= 1 is required")
    if n_train < 1 or n_test < 0:
        raise ConfigError("n_train must be >= 1 and n_test >= 0")

    ss = np.random.SeedSequence(seed)
    s_y, s_coef, s_curve, s_cone, s_perm, s_noise = ss.spawn(6)
    m = n_train + n_test
    y = _distinct_uniform(np.random.default_rng(s_y), m)

    coef_rng = np.random.default_rng(s_coef)
    cone = None
    curve_seeds = iter(s_curve.spawn(len(specs)))
    columns, kinds, degrees, coefs = [], [], [], []
    for spec in specs:
        if spec.kind in POLY_KINDS:
            c = (np.asarray(spec.coefficients, dtype=float) if spec.coefficients is not None
                 else _unit_amplitude_coefficients(coef_rng, spec.degree))
            columns.append(np.polynomial.polynomial.polyval(y, c))
            coefs.append(c)
            degrees.append(spec.degree)
        elif spec.kind == "nonfunc_curve":
            columns.append(nonfunc_samples("curve", y, next(curve_seeds)))
            coefs.append(None)
            degrees.append(-1)
        else:
            if cone is None:
                cone = nonfunc_samples("cone", y, s_cone)
            columns.append(cone[:, spec.component])
            coefs.append(None)
            degrees.append(-1)
        kinds.append(spec.kind)
    X = np.column_stack(columns)

    p = X.shape[1]
    perm = np.random.default_rng(s_perm).permutation(p) if shuffle_columns else np.arange(p)
    X = X[:, perm]
    kinds = [kinds[j] for j in perm]
    degrees = [degrees[j] for j in perm]
    coefs = [coefs[j] for j in perm]
    width = len(str(p))
    ids = tuple(f"x{j + 1:0{width}d}" for j in range(p))

    poly = [c for c in coefs if c is not None]
    n_nonfunc = sum(k in NONFUNC_KINDS for k in kinds)
    q = _coefficient_rank([np.array([0.0, 1.0])] + poly) + n_nonfunc

    train = DataSet(y=y[:n_train], X=X[:n_train], column_ids=ids)
    test = DataSet(y=y[n_train:], X=X[n_train:], column_ids=ids,
                   row_ids=np.arange(n_train, m))
    manifest = GeneratorManifest(
        seed=seed, n_train=n_train, n_test=n_test, kinds=kinds, degrees=degrees,
        coefficients=coefs, q=q, permutation=perm, column_ids=ids,
        exact_train=train, exact_test=test,
    )
    spec_sigmas = np.array([specs[j].noise_sigma for j in perm])
    if noise is not None or np.any(spec_sigmas > 0):
        seed_tr, seed_te = (int(v) for v in s_noise.generate_state(2))
        noisy = set()
        if noise is not None:
            cols = noisy_columns(noise, p, seed)
            train = add_noise(train, noise, seed_tr, columns=cols)
            test = add_noise(test, noise, seed_te, columns=cols)
            manifest.noise = noise
            if noise.sigma > 0 and noise.regime != "y_only":
                noisy |= set(cols)
        if np.any(spec_sigmas > 0):
            rng = np.random.default_rng(s_noise.spawn(1)[0])
            Xtr, Xte = train.X.copy(), test.X.copy()
            for j in np.flatnonzero(spec_sigmas > 0):
                Xtr[:, j] += rng.normal(0.0, spec_sigmas[j], n_train)
                Xte[:, j] += rng.normal(0.0, spec_sigmas[j], n_test)
                noisy.add(int(j))
            train, test = replace(train, X=Xtr), replace(test, X=Xte)
        manifest.noisy_columns = tuple(sorted(noisy))
    return train, test, manifest


def noisy_columns(spec, p, seed):
    """Predictor columns that receive noise under ``spec`` (depends on ``seed`` only)."""
    if spec.regime == "y_only":
        return ()
    if spec.regime == "iid_all":
        return tuple(range(p))
    k = int(round(spec.noisy_column_fraction * p))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x6E6F6973]))
    return tuple(sorted(int(j) for j in rng.choice(p, size=k, replace=False)))


def add_noise(d, spec, seed, columns=None):
    """Return ``d`` with additive N(0, sigma^2) noise per ``spec``.

    ``y`` always receives noise; ``iid_all`` adds it to every predictor and
    ``structured`` to ``columns`` (by default :func:`noisy_columns`). All
    other columns come back bit-identical.
    """
    if spec.sigma == 0:
        return d
    if spec.regime == "y_only":
        columns = ()
    elif columns is None:
        columns = noisy_columns(spec, d.p, seed)
    rng = np.random.default_rng(seed)
    y = d.y + rng.normal(0.0, spec.sigma, d.n)
    X = d.X.copy()
    cols = list(columns)
    if cols:
        X[:, cols] += rng.normal(0.0, spec.sigma, (d.n, len(cols)))
    return replace(d, y=y, X=X, sort_state="unsorted")


def polynomial_specs(count=200, max_degree=10):
    """``count`` exact polynomial columns with degrees cycling through 1..max_degree."""
    return [ColumnSpec("polynomial", 1 + j % max_degree) for j in range(count)]


def _nonfunc_pair():
    return [ColumnSpec("nonfunc_curve"), ColumnSpec("nonfunc_cone", component=0)]


PRESETS = {
    "q11": dict(specs=lambda: polynomial_specs(), noise=None),
    "q14": dict(
        specs=lambda: polynomial_specs() + [ColumnSpec("high_degree_polynomial", 17)] * 3,
        noise=None,
    ),
    "q13-nonfunc": dict(specs=lambda: polynomial_specs() + _nonfunc_pair(), noise=None),
    "linear": dict(specs=lambda: polynomial_specs(max_degree=1), noise=None),
    "noise-y": dict(
        specs=lambda: polynomial_specs() + _nonfunc_pair(),
        noise=NoiseSpec("y_only", 0.05),
    ),
    "noise-structured": dict(
        specs=lambda: polynomial_specs() + _nonfunc_pair(),
        noise=NoiseSpec("structured", 0.05, 1.0 / 3.0),
    ),
}
DEFAULT_N_TRAIN = 150
DEFAULT_N_TEST = 50


def generate_preset(name, seed=0, n_train=DEFAULT_N_TRAIN, n_test=DEFAULT_N_TEST,
                    sigma=None, regime=None, shuffle_columns=True):
    """Generate one of the named experiment setups in ``PRESETS``."""
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    noise = preset["noise"]
    if sigma is not None or regime is not None:
        base = noise or NoiseSpec("y_only", 0.0)
        noise = NoiseSpec(regime or base.regime, base.sigma if sigma is None else sigma,
                          base.noisy_column_fraction)
    return generate_fop(preset["specs"](), n_train, n_test, seed, noise=noise,
                        shuffle_columns=shuffle_columns)
