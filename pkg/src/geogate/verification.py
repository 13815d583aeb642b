"""Independent oracles for the numbers the test suite freezes.

Nothing here imports the pulse builders, the models or the integrator; the
only shared code is :mod:`geogate.matrixcore`. Sequences are re-derived from
their segment formulas, propagators from explicit 2x2 blocks, damping from
the generator acting on a single matrix element, and Bessel values from
their ascending series.

Running ``python -m geogate.verification out.json`` writes the manifest.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Sequence

import numpy as np

from .matrixcore import I2, SX, SY, SZ, dagger, kron, matmul, projector

PI = math.pi


@dataclass
class OracleRecord:
    name: str
    inputs: dict
    expected: Any
    method: str
    tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def encode(value):
    """JSON-friendly form: complex numbers become ``[re, im]`` pairs."""
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def decode_matrix(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


# ---- closed-form kernels -------------------------------------------------


def rotation_block(area: float, phase: float) -> np.ndarray:
    """``exp(-i (area/2)(cos p X + sin p Y))`` written out entry by entry."""
    c, s = math.cos(area / 2), math.sin(area / 2)
    return np.array(
        [[c, -1j * s * complex(math.cos(phase), -math.sin(phase))],
         [-1j * s * complex(math.cos(phase), math.sin(phase)), c]]
    )


def su2_product_oracle(segments: Sequence[tuple[float, float]]) -> np.ndarray:
    """Ordered product of resonant blocks; the first segment acts first."""
    u = I2.copy()
    for area, phase in segments:
        u = matmul(rotation_block(area, phase), u)
    return u


def axis_rotation(alpha0: float, beta0: float, gamma: float) -> np.ndarray:
    """``cos g I - i sin g n.sigma`` with ``n`` at polar ``alpha0``, azimuth ``beta0``."""
    n = (math.sin(alpha0) * math.cos(beta0), math.sin(alpha0) * math.sin(beta0), math.cos(alpha0))
    return math.cos(gamma) * I2 - 1j * math.sin(gamma) * (n[0] * SX + n[1] * SY + n[2] * SZ)


def lindblad_generator(h: np.ndarray, channels, rho: np.ndarray) -> np.ndarray:
    """``i[rho, H] + 1/2 sum k (2 A rho A^+ - A^+A rho - rho A^+A)`` by direct products."""
    out = 1j * (matmul(rho, h) - matmul(h, rho))
    for rate, a in channels:
        ad = dagger(a)
        out = out + 0.5 * rate * (
            2 * matmul(matmul(a, rho), ad) - matmul(matmul(ad, a), rho) - matmul(rho, matmul(ad, a))
        )
    return out


def damping_rate(kappa: float = 1.0) -> float:
    """Decay constant of ``<1|rho|1>`` read off the generator, not assumed."""
    rho = projector(2, 1)
    d = lindblad_generator(np.zeros((2, 2), complex), [(kappa, projector(2, 0, 1))], rho)
    return float(-d[1, 1].real)


def damping_oracle(kappa: float, T: float) -> float:
    """Excited population after time ``T`` of pure decay at rate ``kappa``.

    The generator is linear in ``<1|rho|1>`` alone, so the solution is an
    exponential with the derived rate.
    """
    return math.exp(-damping_rate(kappa) * T)


def bessel_oracle(beta: float, n: int = 1) -> float:
    """``J_n(beta)`` by the ascending series, ``|beta| <= 10``."""
    if abs(beta) > 10:
        raise ValueError("series oracle limited to |beta| <= 10")
    terms = []
    m = 0
    while True:
        t = (-1) ** m * (beta / 2) ** (n + 2 * m) / (math.factorial(m) * math.factorial(m + n))
        terms.append(t)
        if m > n and abs(t) < 1e-18:
            break
        m += 1
    return math.fsum(terms)


def global_phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(1.0 - abs(np.trace(dagger(a) @ b)) / a.shape[0])


# ---- segment formulas, re-derived -----------------------------------------


def ocngqg_segments(a0, b0, g, k, path="A"):
    if path == "A":
        p2, p5, p6 = b0 - g / 2 + PI / 2, b0 + k + PI / 2, b0 + k + g / 2 - PI / 2
    else:
        p2, p5, p6 = b0 - g / 2 - PI / 2, b0 - k + PI / 2, b0 - k + g / 2 + PI / 2
    return [
        (a0, b0 - PI / 2),
        (PI, p2),
        (PI - a0, b0 - PI / 2),
        (a0, b0 - PI / 2),
        (PI, p5),
        (PI, p6),
        (a0, b0 + PI / 2),
    ]


def loop_segments(a0, b0, g, path="A", loops=1):
    s = 1 if path == "A" else -1
    one = [(a0, b0 - PI / 2), (PI, b0 - g / loops + s * PI / 2), (PI - a0, b0 - PI / 2)]
    return one * loops


DYNAMICAL = {
    "S": [(PI / 2, 0.0), (PI / 2, 3 * PI / 2), (PI / 2, PI)],
    "H": [(PI / 2, PI / 2), (PI, 0.0)],
}


def nonzero(segments):
    return [s for s in segments if s[0] > 0]


# ---- manifest --------------------------------------------------------------

_RECORDS: list[Callable[[], OracleRecord]] = []


def record(fn: Callable[[], OracleRecord]) -> Callable[[], OracleRecord]:
    _RECORDS.append(fn)
    return fn


@record
def _matmul_triple_loop():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    c = [[sum(a[i, k] * b[k, j] for k in range(4)) for j in range(4)] for i in range(4)]
    return OracleRecord("matmul_random_4x4", {"a": encode(a), "b": encode(b)}, encode(np.array(c)),
                        "triple loop", 1e-12)


@record
def _kron_basis():
    v = np.zeros(4, complex)
    v[0] = 1
    out = [sum(kron(SX, SX)[i, j] * v[j] for j in range(4)) for i in range(4)]
    return OracleRecord("kron_xx_on_00", {}, encode(np.array(out)), "basis-vector product", 0.0)


@record
def _expm_su2():
    th = PI / 3
    u = math.cos(th / 2) * I2 - 1j * math.sin(th / 2) * SX
    return OracleRecord("expm_su2_x_pi3", {"theta": th}, encode(u), "closed-form su(2)", 1e-12)


@record
def _expm_inverse():
    return OracleRecord("expm_inverse_identity", {"dim": 3, "norm_max": 1.0}, encode(np.eye(3, dtype=complex)),
                        "expm(A) expm(-A) = I", 1e-10)


@record
def _meridian_drive():
    # alpha from 0 to pi at speed W with beta fixed: alpha' = W sin(phi - beta) needs sin(phi - beta) = +1
    return OracleRecord("meridian_ascent_drive", {"omega0": 1.0, "beta0": 0.3},
                        {"rabi": 1.0, "phase": 0.3 + PI / 2}, "substitution into the path relations", 1e-9)


@record
def _circle_dynamical():
    val = 0.5 * 2 * PI * math.sin(PI / 4) * math.tan(PI / 4)
    return OracleRecord("circle_pi4_dynamical_phase", {"alpha": PI / 4}, val, "constant integrand", 1e-6)


@record
def _equator_geometric():
    return OracleRecord("equator_geometric_phase", {"alpha": PI / 2}, 0.5 * 2 * PI * (1 - 0.0),
                        "half the enclosed solid angle, gate orientation", 1e-6)


@record
def _ocngqg_s_phases():
    segs = ocngqg_segments(0.0, 0.0, PI / 4, 1.13 * PI)
    return OracleRecord("ocngqg_s_k113_segments", {"k_pi": 1.13},
                        {"areas": [s[0] for s in segs], "phases": [s[1] for s in nonzero(segs)]},
                        "segment formula", 1e-12)


@record
def _ngqg_s_phases():
    segs = loop_segments(0.0, 0.0, PI / 4)
    return OracleRecord("ngqg_a_s_segments", {}, {"areas": [s[0] for s in segs], "phases": [s[1] for s in segs]},
                        "segment formula", 1e-12)


@record
def _cngqg_s_phases():
    segs = loop_segments(0.0, 0.0, PI / 4, loops=2)
    return OracleRecord("cngqg_a_s_two_loops", {}, {"count": len(segs), "phase_2": segs[1][1], "phase_5": segs[4][1]},
                        "segment formula", 1e-12)


@record
def _dg_propagators():
    return OracleRecord("dg_propagators", {},
                        {"S": encode(su2_product_oracle(DYNAMICAL["S"])), "H": encode(su2_product_oracle(DYNAMICAL["H"]))},
                        "product of resonant blocks", 1e-12)


@record
def _gate_targets():
    return OracleRecord("gate_targets", {},
                        {"S": encode(axis_rotation(0, 0, PI / 4)), "H": encode(axis_rotation(PI / 4, 0, PI / 2))},
                        "cos g I - i sin g n.sigma", 1e-12)


@record
def _scheme_products():
    out = {}
    for name, (a0, g) in {"S": (0.0, PI / 4), "H": (PI / 4, PI / 2)}.items():
        out[name] = {
            "OCNGQG-A": encode(su2_product_oracle(ocngqg_segments(a0, 0.0, g, 1.3 * PI, "A"))),
            "OCNGQG-B": encode(su2_product_oracle(ocngqg_segments(a0, 0.0, g, 1.3 * PI, "B"))),
            "CNGQG-A": encode(su2_product_oracle(loop_segments(a0, 0.0, g, "A", 2))),
            "CNGQG-B": encode(su2_product_oracle(loop_segments(a0, 0.0, g, "B", 2))),
            "NGQG-A": encode(su2_product_oracle(loop_segments(a0, 0.0, g, "A"))),
            "NGQG-B": encode(su2_product_oracle(loop_segments(a0, 0.0, g, "B"))),
            "DG": encode(su2_product_oracle(DYNAMICAL[name])),
        }
    return OracleRecord("scheme_products_k13", {"k_pi": 1.3}, out, "product of resonant blocks", 1e-12)


@record
def _drag_quarter():
    om, alpha = 2 * PI * 60e6, 2 * PI * 320e6
    T = 2 * (PI / 2) / om
    val = -om * PI / (2 * alpha * T) * math.sin(PI / 2)
    return OracleRecord("drag_quadrature_quarter", {"omega_max": om, "alpha": alpha, "T": T}, val,
                        "derivative of sin^2", 1e-9)


@record
def _z_error():
    return OracleRecord("z_error_term", {"delta": 0.1, "omega_max": 1.0}, encode(-0.05 * SZ),
                        "direct substitution", 1e-15)


@record
def _transmon_static():
    a = 2 * PI * 320e6
    return OracleRecord("transmon_static_d3", {"alpha": a}, [0.0, 0.0, -a], "-l(l-1)/2 alpha", 1e-6)


@record
def _g_eff():
    g = 2 * PI * 10e6
    j1 = bessel_oracle(1.8)
    return OracleRecord("g_eff_beta18", {"g12": g, "beta": 1.8}, 2 * math.sqrt(2) * g * j1, "series", 1e-6)


@record
def _rabi_pi():
    return OracleRecord("rabi_pi_pulse", {}, encode(projector(2, 1)), "resonant pi rotation", 1e-8)


@record
def _damping_curve():
    pts = [0.0, 0.25, 0.5, 1.0, math.log(2), 1.5, 2.0]
    return OracleRecord("damping_population", {"kappa_T": pts, "rate_factor": damping_rate(1.0)},
                        [damping_oracle(1.0, x) for x in pts], "generator element, exponential solution", 1e-8)


@record
def _damping_half():
    # the population halves where rate * T = ln 2
    kt = math.log(2) / damping_rate(1.0)
    return OracleRecord("damping_half_life", {"kappa_T": kt}, damping_oracle(1.0, kt), "analytic", 1e-12)


@record
def _bessel():
    h = 1e-5
    b = 1.8
    deriv = (bessel_oracle(b + h) - bessel_oracle(b - h)) / (2 * h)
    ident = 0.5 * (bessel_oracle(b, 0) - bessel_oracle(b, 2))
    return OracleRecord("bessel_j1", {"beta": b}, {"j1": bessel_oracle(b), "j1_0": bessel_oracle(0.0),
                                                  "derivative": deriv, "identity": ident}, "series", 1e-6)


@record
def _identity_vs_cp():
    # beta = 0 switches the exchange off, leaving the identity on the pair
    r = 1 / math.sqrt(2)
    singles = [np.array([1, 0]), np.array([0, 1]), np.array([r, -1j * r]), np.array([r, r])]
    u = np.diag([1, 1, 1, -1j])
    vals = []
    for a, b in itertools.product(singles, repeat=2):
        psi = np.kron(a, b)
        vals.append(abs(np.vdot(u @ psi, psi)) ** 2)
    return OracleRecord("cp_identity_fidelity", {}, math.fsum(vals) / 16, "16 product states", 1e-12)


@record
def _distance_x():
    return OracleRecord("distance_identity_sigma_x", {}, global_phase_distance(I2, SX), "trace", 1e-15)


@record
def _segment_counts():
    ocn = nonzero(ocngqg_segments(0.0, 0.0, PI / 4, 1.13 * PI))
    ngh = loop_segments(PI / 4, 0.0, PI / 2)
    return OracleRecord("export_segment_counts", {},
                        {"ocngqg_s_nonzero": len(ocn), "ngqg_a_h_areas": [s[0] for s in ngh],
                         "dg_h_count": len(DYNAMICAL["H"])}, "segment formula", 1e-12)


@record
def _ideal_bounds():
    return OracleRecord("ideal_construction_bounds", {},
                        {"ocngqg_s_fidelity": 1.0, "cp_effective_min": 0.9999, "cp_effective_trace_max_infidelity": 1e-4,
                         "ocngqg_s_state_phase": encode(complex(np.exp(-1j * PI / 4)))},
                        "ideal construction", 1e-6)


def all_records() -> list[OracleRecord]:
    return [fn() for fn in _RECORDS]


def manifest() -> dict:
    return {"records": [r.to_dict() for r in all_records()]}


def write_manifest(path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_manifest(path) -> dict[str, OracleRecord]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return {r["name"]: OracleRecord(**r) for r in data["records"]}


def main(argv: Sequence[str] | None = None) -> int:
    p = argparse.ArgumentParser(description="write the oracle manifest")
    p.add_argument("path")
    args = p.parse_args(argv)
    write_manifest(args.path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
