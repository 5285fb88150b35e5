import json as _json

import numpy as _np

from ._hehom import (
    CertificationError,
    ConsistencyError,
    HehomError,
    InvalidInput,
    NumericalError,
    ResolutionFailure,
    _Model,
)

__all__ = [
    "Model",
    "HehomError",
    "InvalidInput",
    "ResolutionFailure",
    "CertificationError",
    "NumericalError",
    "ConsistencyError",
]


class Model:
    """Threshold model built from a run configuration (dict, JSON text or path)."""

    def __init__(self, config):
        if isinstance(config, dict):
            text = _json.dumps(config)
        elif isinstance(config, str) and config.lstrip().startswith("{"):
            text = config
        else:
            with open(config) as f:
                text = f.read()
        self._m = _Model(text)

    @property
    def dim(self):
        return self._m.dim

    @property
    def basis_size(self):
        return self._m.basis_size

    def threshold(self):
        return _json.loads(self._m.threshold())

    def tensors(self):
        return _json.loads(self._m.tensors())

    def ledger(self):
        return _json.loads(self._m.ledger())

    def bands(self, ks, count):
        ks = _np.atleast_2d(_np.asarray(ks, dtype=float))
        if ks.shape[1] != self.dim and ks.shape[0] == self.dim:
            ks = ks.T
        return self._m.bands(ks, int(count))

    def symbol(self, dk):
        return self._m.symbol(_np.atleast_1d(_np.asarray(dk, dtype=float)))

    def bound_sample(self, dk, tau):
        return self._m.bound_sample(_np.atleast_1d(_np.asarray(dk, dtype=float)), float(tau))

    def evolve(self, eps, tau):
        return self._m.evolve(float(eps), float(tau))

    def converge(self):
        return _json.loads(self._m.converge())
