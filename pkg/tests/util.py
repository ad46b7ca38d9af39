"""Small shared builders for randomized tests."""

import numpy as np

from raptorkit.decoder import TannerGraph
from raptorkit.degrees import OutputDegreeDistribution, poisson_input
from raptorkit.evolution import EvolutionContext
from raptorkit.jfunction import channel_from_sigma
from raptorkit.transfer import TransferFunction


def graph_from_checks(n_vars, checks):
    """TannerGraph from the oracle check-list description (llr None = static)."""
    dyn_var, dyn_check, llrs = [], [], []
    stat_var, stat_check = [], []
    for chk in checks:
        if chk["llr"] is not None:
            ci = len(llrs)
            llrs.append(chk["llr"])
            for v in chk["vars"]:
                dyn_var.append(v)
                dyn_check.append(ci)
        else:
            ci = (max(stat_check) + 1) if stat_check else 0
            for v in chk["vars"]:
                stat_var.append(v)
                stat_check.append(ci)
    return TannerGraph(
        k=n_vars,
        dyn_edge_var=np.array(dyn_var, dtype=np.int64),
        dyn_edge_check=np.array(dyn_check, dtype=np.int64),
        dyn_llrs=np.array(llrs, dtype=float),
        stat_edge_var=np.array(stat_var, dtype=np.int64),
        stat_edge_check=np.array(stat_check, dtype=np.int64),
    )


def random_edge_dist(rng, n_terms=6, d_max=40, force_w1=None):
    degs = rng.choice(np.arange(1, d_max + 1), size=n_terms, replace=False)
    w = rng.uniform(0.05, 1.0, size=n_terms)
    w /= w.sum()
    weights = {int(d): float(v) for d, v in zip(degs, w)}
    if force_w1 is not None:
        rest = 1.0 - force_w1
        weights.pop(1, None)
        total = sum(weights.values())
        weights = {d: v * rest / total for d, v in weights.items()}
        if force_w1 > 0.0:
            weights[1] = force_w1
    return OutputDegreeDistribution.from_edge_weights(weights)


def random_context(rng, transfer=None, alpha_range=(5.0, 40.0), sigma_range=(0.6, 1.2)):
    alpha = float(rng.uniform(*alpha_range))
    sigma = float(rng.uniform(*sigma_range))
    if transfer is None:
        transfer = TransferFunction.null()
    return EvolutionContext(
        channel=channel_from_sigma(sigma),
        input_ensemble=poisson_input(alpha),
        transfer=transfer,
        dist=random_edge_dist(rng),
    )


def rejection_sample_feasible(cfg, alpha, problem, opt_weights, rng, n_samples):
    """Random feasible edge-weight vectors near and far from the LP optimum.

    Candidates come from pairwise mass exchanges along the simplex (sharp,
    probes the binding boundary), blends of the optimum with Dirichlet draws,
    and raw Dirichlet long shots.  Feasibility is established by direct
    evaluation of the start, convergence, and stability constraints, not by
    reusing the LP's row/rhs arithmetic.  Returns (n_feasible, min_cost).
    """
    import numpy as np

    from raptorkit.evolution import stability_floor_omega2

    degs = problem.meta["degrees"]
    coeff = problem.meta["coeff"]
    xs = problem.meta["grid"]
    channel = cfg.channel
    margin = cfg.strict_margin
    floor2 = stability_floor_omega2(alpha, channel) if alpha > 1.0 else 0.0
    idx1 = int(np.searchsorted(degs, 1))
    idx2 = int(np.searchsorted(degs, 2))
    inv_deg = 1.0 / degs

    def feasible(w, tol=1e-9):
        """Same margined feasible set the optimizer faces, re-derived from the
        constraint definitions rather than the assembled rows; tol absorbs the
        solver roundoff the optimum itself carries on its binding rows."""
        if np.any(w < -tol):
            return False
        if w[idx1] * channel.x0 < cfg.epsilon_start + margin - tol:
            return False
        if w[idx2] < floor2 * (1.0 + margin) - tol:
            return False
        return not np.any(coeff @ w > 1.0 - xs - margin + tol)

    support = np.flatnonzero(opt_weights > 1e-9)
    donors = support[degs[support] > 2]  # keep the start/stability floors intact
    n_found = 0
    min_cost = np.inf
    for s in range(n_samples):
        mode = s % 4
        if mode == 0:
            # sharp probe: arbitrary pairwise exchange; a suboptimal vertex
            # would expose a feasible cheaper neighbor here
            cand = opt_weights.copy()
            i = int(rng.choice(support))
            j = int(rng.integers(0, degs.size))
            eta = 10.0 ** rng.uniform(-7.0, -3.0)
            if i == j or cand[i] < eta:
                continue
            cand[i] -= eta
            cand[j] += eta
        elif mode == 1:
            # mass toward lower degrees loosens every row (a_d grows with d)
            cand = opt_weights.copy()
            i = int(rng.choice(donors))
            j = int(rng.integers(0, np.searchsorted(degs, degs[i])))
            eta = min(10.0 ** rng.uniform(-6.0, -1.0), cand[i])
            cand[i] -= eta
            cand[j] += eta
        elif mode == 2:
            theta = 1.0 - 10.0 ** rng.uniform(-6.0, -3.5)
            cand = theta * opt_weights + (1.0 - theta) * rng.dirichlet(np.full(degs.size, 0.1))
        else:
            cand = rng.dirichlet(np.full(degs.size, 0.05))
        cand = cand / cand.sum()
        if feasible(cand):
            n_found += 1
            min_cost = min(min_cost, float(np.dot(cand, inv_deg)))
    return n_found, min_cost
