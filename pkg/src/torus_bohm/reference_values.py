"""Published reference values used for comparison reports.

Table 1: surface toroidal wave functions for R = 1, a = 1/2. Each entry maps a
label (parity, n, m) to (beta, {fourier mode: coefficient}); parity "+" modes
multiply cos(k theta) and parity "-" modes multiply sin(k theta).

Tables 2 and 3: Lyapunov exponents at t = 9, t = 10 and the windowed exponent
on the 12-point theta0 grid, for the torus (T2) and the flat strip (F2).
"""

import numpy as np

TABLE1_SHAPE = {"R": 1.0, "a": 0.5}

TABLE1 = {
    ("+", 1, 0): (1.2223, {0: -0.2176, 1: 0.4352, 2: -0.0714, 3: 0.0118}),
    ("+", 2, 1): (4.4767, {0: -0.0733, 1: 0.2419, 2: -0.8393, 3: 0.0541}),
    ("+", 3, 2): (10.6657, {0: -0.0420, 1: 0.1240, 2: -0.2772, 3: 0.8240}),
    ("-", 1, 0): (0.9767, {1: 0.8118, 2: -0.0739}),
    ("-", 2, 1): (4.4106, {1: -0.1799, 2: -0.8367}),
    ("-", 3, 2): (10.6151, {1: -0.0808, 2: 0.2568, 3: -0.8257}),
}

# theta0 = j pi / 6, j = 0..11
THETA0_GRID = tuple(j * np.pi / 6.0 for j in range(12))


def _row(text):
    return tuple(text.split())


# Values are kept as printed so the rounding precision is recoverable.
TABLE2 = {
    "source": "Table 2: sqrt(1/2) Psi+_32 + sqrt(1/2) Psi-_32",
    "torus": {
        "lambda9": _row("2.12 4.23 2.53 1.91 3.36 2.29 2.75 2.55 3.11 1.72 1.23 2.70"),
        "lambda10": _row("4.10 5.08 3.67 2.65 4.17 2.69 2.57 2.85 5.73 2.39 2.59 3.27"),
        "lambda": _row("21.9 12.7 13.9 9.35 11.5 6.35 .96 5.53 29.3 8.44 14.8 8.40"),
    },
    "flat": {
        "lambda9": _row(".030 .036 .034 .033 .036 .032 .030 .036 .034 .033 .033 .036"),
        "lambda10": _row(".047 .056 .050 .046 .049 .048 .047 .056 .050 .046 .046 .056"),
        "lambda": _row(".185 .234 .179 .161 .155 .195 .186 .233 .179 .160 .155 .235"),
    },
}

TABLE3 = {
    "source": "Table 3: sqrt(1/2) Psi+_10 + sqrt(1/2) Psi-_10",
    "torus": {
        "lambda9": _row("2.46 1.69 1.68 1.63 1.67 1.86 2.01 3.59 3.64 3.22 3.13 6.87"),
        "lambda10": _row("2.55 1.65 1.63 1.58 1.61 1.74 1.92 3.28 3.97 3.99 3.73 6.90"),
        "lambda": _row("3.39 1.23 1.02 1.19 1.07 .067 1.18 .447 7.00 10.90 9.14 7.16"),
    },
    "flat": {
        "lambda9": _row(".086 .684 -.003 .022 .002 .009 .086 .684 -.003 .022 .002 .009"),
        "lambda10": _row(".122 .336 .450 .124 .015 .032 .122 .336 .450 .124 .015 .032"),
        "lambda": _row(".415 -2.45 4.52 .942 .133 .239 .415 -2.45 4.52 .942 .133 .239"),
    },
}

LYAPUNOV_TABLES = {"table2": TABLE2, "table3": TABLE3}


def values(row) -> np.ndarray:
    return np.array([float(x) for x in row])


def half_unit(text: str) -> float:
    """Half of the last printed digit's unit, i.e. the rounding radius."""
    digits = text.split(".")[1] if "." in text else ""
    return 0.5 * 10.0 ** (-len(digits))
