"""Smoke test for the Python bindings.

Build and install first:  pip install ./crates/py  (or `maturin develop -m crates/py/Cargo.toml`)
"""

import direction_space_py as ds


def main() -> None:
    tree = ds.Instance("tree:3")
    assert tree.scale("shift:1")["value"] == 2
    assert tree.classify("identity")["kind"] == "Elliptic"
    axis = tree.axis("shift:1", shortlex=True, color_seed=1)
    assert axis["length"] >= 17

    example = ds.Instance("example:2", ds.Profile(power_bound=12))
    assert example.delta("a", "a-inverse")["delta"] == 2.0
    report = example.directions(["a", "a^2", "a-inverse"])
    assert report["classCount"] == 2

    try:
        tree.classify("bogus:1")
    except ds.DirectionSpaceError as e:
        assert "ParseError" in str(e)
    else:
        raise AssertionError("expected a parse error")

    results = ds.run_verify("3,6")
    assert all(r["passed"] for r in results), results
    print(f"direction_space_py {ds.version()}: smoke test passed")


if __name__ == "__main__":
    main()
