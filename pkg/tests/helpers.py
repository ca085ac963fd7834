import numpy as np

import gaugemc as g


def random_disorder(kind, lsize, seed=0, p=0.08):
    """A quenched sample with generic couplings for invariance tests."""
    rates = g.NoiseRates.symmetric_depolarizing(p)
    coup = g.nishimori_coupling_set(kind, rates, normalized=True)
    return g.sample_disorder(kind, rates, coup, lsize,
                             g.disorder_seed(seed, 0))


def random_state(config, seed=1):
    kind = config.kind
    return g.make_lattice(config.lsize, kind.dim, kind.sublattices, "random",
                          np.random.default_rng(seed))


ALL_KINDS = (g.ModelKind.RBIM, g.ModelKind.R8VM, g.ModelKind.RPGM,
             g.ModelKind.RCPGM)
