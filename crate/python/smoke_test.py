"""Smoke test for the pyspinanneal extension.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import json
import math

import pyspinanneal as sa


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    names = [name for name, _ in sa.presets()]
    assert names == ["chain", "square", "chain_loops", "complete"], names

    g = sa.SpinGraph.preset("complete", -1.0, 1.0)
    assert g.n_sites == 4 and len(g.edges) == 6
    assert sa.SpinGraph.from_json(g.to_json()) == g

    # Driver boundary: gap 2 at lambda = 0, ground state is |++++>.
    gap, degeneracy = sa.gap(g, 0.0)
    assert close(gap, 2.0) and degeneracy == 1
    energies, states = sa.spectrum(g, 0.0)
    assert close(energies[0], -4.0)
    assert close(sa.coherence(states[0]), 15.0)

    # Target boundary: |1111> has no entanglement and magnetization -1.
    energies, states = sa.spectrum(g, 1.0)
    ground = states[0]
    assert close(abs(ground[15]), 1.0)
    assert close(sa.magnetization(ground), -1.0)
    assert sa.entanglement_entropy(ground, [1, 2]) < 1e-12

    bell = [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)]
    assert close(sa.entanglement_entropy(bell, [1]), math.log(2))
    assert close(sa.entanglement_entropy(bell, [1], base="binary"), 1.0)
    assert close(sa.fidelity(bell, [1, 0, 0, 0]), 0.5)

    h = sa.hamiltonian(g, 0.5, model="dm", trigger="yy")
    assert len(h) == 16 and all(close(h[r][c], h[c][r].conjugate()) for r in range(16) for c in range(16))

    result = sa.run_sweep(g, model="ising", lambda_points=101)
    assert len(result) == 101
    lam_star, gap_star = result.min_gap
    assert gap_star > 0.1 and 0.0 < lam_star < 1.0
    last = result.records()[-1]
    assert close(last["fidelity"], 1.0) and close(last["magnetization"], -1.0)
    summary = result.summary()
    assert 0.7 < summary["mean_fidelity"] < 0.8

    sequential = sa.run_sweep(g, model="ising", lambda_points=101, parallel=False)
    assert sequential.to_csv() == result.to_csv()

    replay = sa.run_config(json.dumps(result.config()))
    assert replay.to_csv() == result.to_csv()

    try:
        sa.SpinGraph.preset("triangle")
    except ValueError as e:
        assert "chain_loops" in str(e)
    else:
        raise AssertionError("unknown preset accepted")

    print(f"pyspinanneal {sa.__version__}: ok ({result!r})")


if __name__ == "__main__":
    main()
