"""Identity suites and their reports.

A suite is a list of checks; each check samples parameters deterministically
from ``(seed, suite, check, instance)``, evaluates one left-hand operation and
one right-hand operation, and records a :class:`CheckReport`.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import continuous as cs
from . import discrete as ds
from .core import Nome, elliptic_gamma, qpow, shifted_factorial, theta
from .detkit import (
    DiscreteMeasure,
    andreief_lhs,
    andreief_rhs,
    det,
    det_condition,
    rel_residual,
    warnaar_det_closed,
    warnaar_det_direct,
    warnaar_matrix,
)
from .errors import EllipticError, SamplingError

__all__ = [
    "SUITES",
    "DEFAULT_TOLERANCES",
    "DEFAULT_COUNTS",
    "DEFAULT_P",
    "DEFAULT_Q",
    "SuiteConfig",
    "CheckReport",
    "run_suites",
    "render_report",
    "parse_reports",
]

SUITES = ("core", "det", "discrete", "continuous", "proof-replay")

# (modulus, argument)
DEFAULT_P = (0.20, 0.3)
DEFAULT_Q = (0.45, 1.1)

DEFAULT_COUNTS = {"core": 50, "det": 20, "discrete": 15, "continuous": 3, "proof-replay": 3}

# near-singular Warnaar matrices lose digits in the entries themselves
WARNAAR_MAX_CONDITION = 1e4

DEFAULT_TOLERANCES = {
    "core.gamma_shift": 1e-12,
    "core.gamma_factorial": 1e-12,
    "core.reflection": 1e-12,
    "core.theta_quasi_period": 1e-12,
    "det.warnaar": 1e-9,
    "det.andreief": 1e-10,
    "discrete.mbs": 1e-9,
    "discrete.mbt": 1e-9,
    "discrete.mbt_degenerate": 1e-10,
    "continuous.beta": 1e-8,
    "continuous.esi_tq": 1e-6,
    "continuous.esi_general": 1e-6,
    "continuous.eit_n1": 1e-8,
    "continuous.eit_n2": 1e-5,
    "continuous.eit_v_sign": 1e-10,
    "proof.sjk_lhs": 1e-9,
    "proof.sjk_rhs": 1e-9,
    "proof.sjk_cauchy_binet": 1e-10,
    "proof.ijk_entries": 1e-8,
    "proof.ijk_det_closed": 1e-9,
    "proof.di": 1e-6,
}


@dataclass
class SuiteConfig:
    suites: tuple = ()
    seed: int = 0
    counts: dict = field(default_factory=dict)
    p: tuple = DEFAULT_P
    q: tuple = DEFAULT_Q
    tol: dict = field(default_factory=dict)
    quad_caps: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "text"
    timing: bool = False

    def __post_init__(self):
        self.suites = tuple(self.suites)
        unknown = set(self.suites) - set(SUITES)
        if unknown:
            raise ValueError(f"unknown suites: {sorted(unknown)}")
        for name, c in self.counts.items():
            if name not in SUITES:
                raise ValueError(f"count for unknown suite {name!r}")
            if int(c) < 1:
                raise ValueError("counts must be >= 1")
        for key, value in self.tol.items():
            if not value > 0:
                raise ValueError(f"tolerance for {key} must be positive")
        for dims, cap in self.quad_caps.items():
            if int(dims) < 1 or int(cap) < 16:
                raise ValueError("quad caps need dims >= 1 and cap >= 16")
        if self.format not in ("text", "json"):
            raise ValueError("format must be 'text' or 'json'")
        self.nome  # validates |p|, |q| < 1

    @property
    def nome(self):
        return Nome.from_polar(self.p[0], self.p[1], self.q[0], self.q[1])

    def count(self, suite):
        return int(self.counts.get(suite, DEFAULT_COUNTS[suite]))

    def tolerance(self, check_id):
        return float(self.tol.get(check_id, DEFAULT_TOLERANCES[check_id]))

    def cap(self, dims):
        caps = {int(k): int(v) for k, v in self.quad_caps.items()}
        return caps.get(dims)


@dataclass
class CheckReport:
    check_id: str
    params: list
    lhs: complex | None
    rhs: complex | None
    rel_residual: float | None
    passed: bool
    runtime_ms: float = 0.0
    error: str | None = None

    def to_json(self):
        out = {
            "check_id": self.check_id,
            "params": [{"name": k, "value": _pair(v)} for k, v in self.params],
            "lhs": None if self.lhs is None else _pair(self.lhs),
            "rhs": None if self.rhs is None else _pair(self.rhs),
            "rel_residual": self.rel_residual,
            "pass": self.passed,
            "runtime_ms": self.runtime_ms,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_json(cls, d):
        def cx(v):
            return None if v is None else complex(v[0], v[1])

        return cls(
            check_id=d["check_id"],
            params=[(e["name"], cx(e["value"])) for e in d["params"]],
            lhs=cx(d["lhs"]),
            rhs=cx(d["rhs"]),
            rel_residual=d["rel_residual"],
            passed=d["pass"],
            runtime_ms=d["runtime_ms"],
            error=d.get("error"),
        )


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


# ------------------------------------------------------------------ checks


def _rng(seed, suite, check_id, index):
    key = [seed, SUITES.index(suite), sum(ord(c) * 131**i for i, c in enumerate(check_id)) % 2**32, index]
    return np.random.default_rng(key)


def _rand_point(rng, lo, hi):
    return complex(rng.uniform(lo, hi) * np.exp(2j * np.pi * rng.uniform()))


def _core_checks(cfg):
    nome = cfg.nome
    p, q = nome.p, nome.q

    def z_of(rng):
        return {"z": _rand_point(rng, 0.4, 1.6)}

    def gamma_shift(rng):
        z = z_of(rng)["z"]
        return [("z", z)], elliptic_gamma(q * z, nome), theta(z, nome) * elliptic_gamma(z, nome)

    def gamma_factorial(rng):
        z = z_of(rng)["z"]
        k = int(rng.integers(1, 6))
        lhs = elliptic_gamma(qpow(q, k) * z, nome)
        return [("z", z), ("k", k)], lhs, shifted_factorial(z, k, nome) * elliptic_gamma(z, nome)

    def reflection(rng):
        z = z_of(rng)["z"]
        return [("z", z)], elliptic_gamma(z, nome) * elliptic_gamma(p * q / z, nome), 1.0 + 0j

    def quasi(rng):
        z = z_of(rng)["z"]
        return [("z", z)], theta(p * z, nome), -theta(z, nome) / z

    return [("core.gamma_shift", gamma_shift), ("core.gamma_factorial", gamma_factorial),
            ("core.reflection", reflection), ("core.theta_quasi_period", quasi)]


def _det_checks(cfg):
    nome = cfg.nome

    def warnaar(rng, index):
        n = 1 + index % 5
        for _ in range(100):
            a, b = _rand_point(rng, 0.3, 0.9), _rand_point(rng, 0.3, 0.9)
            zs = [_rand_point(rng, 0.3, 0.9) for _ in range(n)]
            if det_condition(warnaar_matrix(a, b, zs, nome)) <= WARNAAR_MAX_CONDITION:
                break
        else:
            raise SamplingError("no well-conditioned Warnaar instance in 100 draws")
        params = [("a", a), ("b", b)] + [(f"z{k + 1}", z) for k, z in enumerate(zs)]
        return params, warnaar_det_direct(a, b, zs, nome), warnaar_det_closed(a, b, zs, nome)

    def andreief(rng, index):
        n = 1 + index % 4
        m = int(rng.integers(n, 9))
        pts = [_rand_point(rng, 0.3, 1.5) for _ in range(m)]
        wts = [_rand_point(rng, 0.5, 1.5) for _ in range(m)]
        mu = DiscreteMeasure(pts, wts)
        # theta-valued handles f_j(x) = theta(a_j x), g_j(x) = theta(b_j x)
        a = [_rand_point(rng, 0.3, 0.9) for _ in range(n)]
        b = [_rand_point(rng, 0.3, 0.9) for _ in range(n)]
        fs = [lambda x, s=s: theta(s * x, nome) for s in a]
        gs = [lambda x, s=s: theta(s * x, nome) for s in b]
        params = [(f"x{i}", x) for i, x in enumerate(pts)] + [(f"w{i}", w) for i, w in enumerate(wts)]
        return params, andreief_lhs(fs, gs, mu), andreief_rhs(fs, gs, mu)

    return [("det.warnaar", warnaar), ("det.andreief", andreief)]


_DISCRETE_GRID = [(n, N) for n in (1, 2, 3) for N in range(2, 7)]


def _discrete_checks(cfg):
    nome = cfg.nome

    def mbs(rng, index):
        n, N = _DISCRETE_GRID[index % len(_DISCRETE_GRID)]
        P = ds.sample_discrete_params(rng, n, N, "mbs", nome)
        return _dparams(P), ds.mbs_lhs(P, nome), ds.mbs_rhs(P, nome)

    def mbt(rng, index):
        n, N = _DISCRETE_GRID[index % len(_DISCRETE_GRID)]
        P = ds.sample_discrete_params(rng, n, N, "mbt", nome)
        return _dparams(P), ds.mbt_lhs(P, nome), ds.mbt_rhs(P, nome)

    def degenerate(rng, index):
        n, N = _DISCRETE_GRID[index % len(_DISCRETE_GRID)]
        P = ds.sample_discrete_params(rng, n, N, "mbt", nome, degenerate=True)
        single = [tuple(range(n))]
        return _dparams(P), ds.mbt_rhs(P, nome, tuples=single), ds.mbt_rhs(P, nome)

    return [("discrete.mbs", mbs), ("discrete.mbt", mbt), ("discrete.mbt_degenerate", degenerate)]


def _dparams(P):
    return P.named() + [("n", P.n), ("N", P.N)]


def _continuous_checks(cfg):
    nome = cfg.nome
    c1, c2 = cfg.cap(1), cfg.cap(2)

    def beta(rng, index):
        P = cs.sample_continuous_params(rng, "esi", 1, "tq", nome)
        return P.named(), cs.beta_integral_lhs(P, nome, cap=c1), cs.beta_integral_rhs(P, nome)

    def esi(mode):
        def check(rng, index):
            P = cs.sample_continuous_params(rng, "esi", 2, mode, nome)
            return P.named(), cs.selberg_lhs(P, nome, cap=c2), cs.selberg_rhs(P, nome)
        return check

    def eit(n):
        def check(rng, index):
            P = cs.sample_continuous_params(rng, "eit", n, "tq", nome)
            cap = c1 if n == 1 else c2
            return P.named(), cs.rains_lhs(P, nome, cap=cap), cs.rains_rhs(P, nome, cap=cap)
        return check

    def v_sign(rng, index):
        P = cs.sample_continuous_params(rng, "eit", 1, "tq", nome)
        return (P.named(), cs.rains_rhs(cs.negate_v(P), nome, cap=c1), cs.rains_rhs(P, nome, cap=c1))

    return [("continuous.beta", beta), ("continuous.esi_tq", esi("tq")),
            ("continuous.esi_general", esi("general")), ("continuous.eit_n1", eit(1)),
            ("continuous.eit_n2", eit(2)), ("continuous.eit_v_sign", v_sign)]


def _proof_checks(cfg):
    nome = cfg.nome
    c1, c2 = cfg.cap(1), cfg.cap(2)

    def sample_sjk(rng, index):
        n = 1 + index % 3
        N = n + 1 + index % 3
        return ds.sample_discrete_params(rng, n, N, "mbt", nome)

    def sjk(side):
        def check(rng, index):
            P = sample_sjk(rng, index)
            form = "direct" if side == "lhs" else "transformed"
            D = det(ds.sjk_matrix(P, nome, form))
            total = ds.mbt_lhs(P, nome) if side == "lhs" else ds.mbt_rhs(P, nome)
            return _dparams(P), D, ds.prefactor_pf(P, nome) * total
        return check

    def cauchy_binet(rng, index):
        P = sample_sjk(rng, index)
        return _dparams(P), det(ds.sjk_matrix(P, nome)), ds.sjk_cauchy_binet(P, nome)

    def ijk_entries(rng, index):
        P = cs.sample_continuous_params(rng, "esi", 2, "tq", nome)
        j, k = 1 + index % 2, 1 + (index // 2) % 2
        Pjk = cs.ijk_params(P, nome, j, k)
        params = P.named() + [("j", j), ("k", k)]
        return params, cs.beta_integral_lhs(Pjk, nome, cap=c1), cs.beta_integral_rhs(Pjk, nome)

    def ijk_closed(rng, index):
        P = cs.sample_continuous_params(rng, "esi", 1 + index % 2, "tq", nome)
        return P.named(), det(cs.ijk_matrix(P, nome, "closed")), cs.ijk_det_closed(P, nome)

    def di(rng, index):
        P = cs.sample_continuous_params(rng, "esi", 2, "tq", nome)
        D, other = cs.di_check(P, nome, cap=c2)
        return P.named(), D, other

    return [("proof.sjk_lhs", sjk("lhs")), ("proof.sjk_rhs", sjk("rhs")),
            ("proof.sjk_cauchy_binet", cauchy_binet), ("proof.ijk_entries", ijk_entries),
            ("proof.ijk_det_closed", ijk_closed), ("proof.di", di)]


def _with_index(fn):
    return lambda rng, index: fn(rng)


_BUILDERS = {
    "core": lambda cfg: [(cid, _with_index(fn)) for cid, fn in _core_checks(cfg)],
    "det": _det_checks,
    "discrete": _discrete_checks,
    "continuous": _continuous_checks,
    "proof-replay": _proof_checks,
}


def _run_check(cfg, suite, check_id, fn, index):
    tol = cfg.tolerance(check_id)
    rng = _rng(cfg.seed, suite, check_id, index)
    start = time.perf_counter()
    try:
        params, lhs, rhs = fn(rng, index)
    except (EllipticError, ValueError, ArithmeticError) as exc:
        elapsed = (time.perf_counter() - start) * 1e3 if cfg.timing else 0.0
        return CheckReport(check_id, [], None, None, None, False, elapsed,
                           error=f"{type(exc).__name__}: {exc}")
    elapsed = (time.perf_counter() - start) * 1e3 if cfg.timing else 0.0
    lhs, rhs = complex(lhs), complex(rhs)
    res = rel_residual(lhs, rhs)
    ok = bool(math.isfinite(res) and res <= tol)
    params = [(k, complex(v)) for k, v in params]
    return CheckReport(check_id, params, lhs, rhs, float(res), ok, elapsed)


def run_suites(config):
    """Run the selected suites; report order is (suite, check, instance)."""
    reports = []
    for suite in SUITES:
        if suite not in config.suites:
            continue
        for check_id, fn in _BUILDERS[suite](config):
            for index in range(config.count(suite)):
                reports.append(_run_check(config, suite, check_id, fn, index))
    return reports


def render_report(reports, format="text"):
    """Serialise reports as aligned text or as a JSON array (returns bytes)."""
    if format == "json":
        return (json.dumps([r.to_json() for r in reports], indent=1) + "\n").encode()
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines = []
    width = max((len(r.check_id) for r in reports), default=10)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        if r.error is not None:
            detail = f"error: {r.error}"
        else:
            detail = f"residual {r.rel_residual:.3e}"
        lines.append(f"{status}  {r.check_id:<{width}}  {detail}  {r.runtime_ms:9.1f} ms")
    passed = sum(r.passed for r in reports)
    lines.append(f"passed {passed}/{len(reports)}")
    return ("\n".join(lines) + "\n").encode()


def parse_reports(data):
    """Inverse of ``render_report(..., "json")``."""
    if isinstance(data, bytes):
        data = data.decode()
    return [CheckReport.from_json(d) for d in json.loads(data)]
