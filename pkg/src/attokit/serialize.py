"""JSON wire helpers. Complex scalars travel as [re, im] pairs of doubles."""

import json

import numpy as np


def cpx(z):
    z = complex(z)
    return [z.real, z.imag]


def uncpx(pair):
    return complex(pair[0], pair[1])


def cpx_seq(values):
    return [cpx(z) for z in values]


def uncpx_seq(pairs):
    return [uncpx(p) for p in pairs]


def cpx_matrix(mat):
    return [[cpx(z) for z in row] for row in np.asarray(mat)]


def uncpx_matrix(rows):
    return np.array([[uncpx(p) for p in row] for row in rows], dtype=complex)


def dumps(obj):
    """Deterministic JSON rendering (sorted keys, fixed indentation)."""
    return json.dumps(obj, sort_keys=True, indent=2)
