"""Smoke test for the pyqwrw extension module.

Build and install first, e.g. `pip install ./crates/python`, then run
`python python/smoke_test.py`.
"""

import pyqwrw as q


def main():
    for name, residual in q.verify_coin_algebra():
        assert residual <= 1e-15, (name, residual)

    cfg = q.LatticeConfig(80, 20)
    chain = q.RwState.point(cfg.d, cfg.start, [1 + 0.5j, 0, 0, 1 - 0.5j])
    walk = chain.lift().evolve(cfg.n)
    p0, p1 = walk.distribution()
    r0, r1 = chain.evolve(cfg.n).quantum_distribution(cfg.n)
    gap = max(abs(a - b) for a, b in zip(p0 + p1, r0 + r1))
    assert gap <= 1e-12, gap
    assert abs(sum(p0) + sum(p1) - 1.0) <= 1e-12

    out = q.run(d=80, n=20)
    report = out["report"]
    assert abs(report["energy"] - 1.0) <= 1e-12
    assert abs(report["population_re"] - 2.0) <= 1e-12

    checks = q.verify(sites=[4, 8, 16], steps=[0, 1, 5])
    failed = [c["name"] for c in checks if not c["passed"]]
    assert not failed, failed

    print(f"pyqwrw {q.__version__}: energy={report['energy']:.15f} "
          f"max|p_qw-p_rw|={gap:.2e} checks={len(checks)} ok")


if __name__ == "__main__":
    main()
