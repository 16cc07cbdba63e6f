import numpy as np

from levy_area.core.coupling_oracle import convergence_study
from levy_area.core.gaussian_source import GaussianSource
from levy_area.core.integrals import QWienerSpec, simulate, simulate_qwiener, simulation_plan
from levy_area.core.selection import SelectionQuery, cutoff, optimal_algorithm
from levy_area.core.types import AlgorithmId, ErrorNorm, WienerIncrement


def milstein_step(x: np.ndarray, b: np.ndarray, w: WienerIncrement, integrals: np.ndarray) -> np.ndarray:
    """
    One Milstein step for the linear equation dX = sum_j B_j X dW_j.

    The B_j do not commute, so the step needs the mixed integrals I_(i,j):
    X + sum_j B_j X W_j + sum_{i,j} B_j B_i X I_(i,j).
    """
    bx = b @ x
    step = x + np.einsum("jk,j->k", bx, w.values)
    bbx = np.einsum("jkl,il->ijk", b, bx)
    return step + np.einsum("ijk,ij->k", bbx, integrals)


if __name__ == "__main__":

    ######
    # Which algorithm?
    # The cheapest algorithm depends on dimension m, step size h and precision eps
    for m, h in [(10, 1e-6), (1000, 0.1), (2, 0.1)]:
        report = optimal_algorithm(SelectionQuery.with_default_eps(m, h))
        print(f"m={m:5d} h={h:g}: {report.algorithm.value} p={report.p} ({report.gaussians} draws)")

    # Cut-off of a fixed algorithm
    query = SelectionQuery(m=50, h=0.01, eps=0.001)
    print("Wiktorsson p for m=50:", cutoff(AlgorithmId.WIKTORSSON, query))

    ######
    # Simulate I(h) for one increment
    src = GaussianSource(seed=2024)
    m, h = 4, 0.01
    w = WienerIncrement.sample(m, h, src)
    integrals = simulate(w, src=src)
    print("--------------")
    print(simulation_plan(m, h))
    print(integrals.entries)
    print("Levy area:")
    print(integrals.levy_area().entries)

    ######
    # Q-Wiener increment with eigenvalues eta_k = k^-2
    eta = 1.0 / np.arange(1, m + 1) ** 2
    spec = QWienerSpec.from_eigenvalues(eta)
    qw = WienerIncrement(spec.sqrt_eigenvalues * WienerIncrement.sample(m, h, src).values, h)
    print("--------------")
    print(simulate_qwiener(qw, spec, src=src).entries)

    ######
    # A few Milstein steps driven by simulated iterated integrals
    # B_j is d x d, one per Wiener component
    b = 0.5 * np.random.default_rng(3).standard_normal((m, 3, 3))
    x = np.ones(3)
    for _ in range(10):
        w = WienerIncrement.sample(m, h, src)
        x = milstein_step(x, b, w, simulate(w, src=src).entries)
    print("--------------")
    print("X(0.1) =", x)

    ######
    # Small Monte-Carlo error study against a coupled reference
    rows = convergence_study(list(AlgorithmId), m=3, ps=[4, 8, 16], p_ref=1024, reps=50, seed=1)
    print("--------------")
    for row in rows:
        print(f"{row.algorithm.value:10s} p={row.p:3d} error={row.error_est:.2e} bound={row.bound:.2e}")

    # The same study measured in the Frobenius norm
    rows = convergence_study([AlgorithmId.MRONROE], m=3, ps=[16], p_ref=1024, reps=50, norm=ErrorNorm.FROBENIUS_L2, seed=1)
    print(rows[0])
