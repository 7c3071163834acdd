import memlab


def test_version():
    assert memlab.__version__


def test_run_program():
    out = memlab.run_program("x := 1 + 2")
    assert out["outcome"] == "done"
    assert out["state"]["store"]["x"] == {"int": 3}


def test_run_program_with_state_and_config():
    state = {"store": {"p": {"ptr": [1, 0]}}, "heap": [[1, 0, {"int": 7}]]}
    out = memlab.run_program("x := [p]", state=state)
    assert out["state"]["store"]["x"] == {"int": 7}

    cfg = {"casts": True}
    out = memlab.run_program("y := alloc(1); z := cast(y)", config=cfg)
    assert out["state"]["store"]["z"] == {"int": 0}


def test_error_outcome():
    out = memlab.run_program("x := [y]")
    assert out["outcome"] == "error"


def test_pretty():
    assert memlab.pretty_program("skip ;  skip") == "skip; skip"
    assert memlab.pretty_assertion("emp*top") == "emp * top"


def test_check_triple():
    res = memlab.check_triple("emp", "x := [y]", "x == 0", mode="err-tolerant")
    assert res["verdict"] == "no-counterexample"
    res = memlab.check_triple("emp", "x := [y]", "top", mode="strict")
    assert res["verdict"] == "counterexample"


def test_campaign_and_hunt():
    rep = memlab.run_campaign("renaming", trials=100, seed=7)
    assert rep["trials"] == 100
    assert rep["violations"] == []

    cfg = {"freshness": "blocks"}
    rep = memlab.hunt("noninterference", cfg, trials=500, seed=1)
    assert rep["violations"]


def test_machine():
    words = memlab.assemble("const 5 r0\nhalt\n")
    assert len(words) == 2
    state = {
        "blocks": {"1": [{"word": words[0]}, {"word": words[1]}]},
        "regs": {},
        "pc": {"ptr": [1, 0]},
    }
    out = memlab.machine_run(state, steps=10)
    assert out["stuck"]
    assert out["steps"] == 1
    assert out["state"]["regs"]["r0"] == {"word": 5}


def test_known_theorems():
    names = memlab.known_theorems()
    assert "frame-ok" in names and "mp-renaming" in names
