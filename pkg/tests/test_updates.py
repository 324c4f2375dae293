"""State-update-pair construction: generated domains, conditions, erasure."""

import itertools

import pytest

from pslens.iposet import UNDEFINED, check_duplicable, verify_iposet
from pslens.laws import LawId, check_law
from pslens.lens import check_u_acceptability, check_u_consistency, is_failure
from pslens.updates import (
    Pair,
    Proper,
    Upd,
    UpdateSpace,
    UpdateSpaceError,
    apply_su,
    check_condition,
    check_state_elimination,
    check_sufficient,
    dt_toy_space,
    dump_update_space,
    enumerate_update_spaces,
    erase,
    erased_iposet,
    g1_violation_space,
    g2_violation_space,
    g3_violation_space,
    gen_iposet,
    load_update_space,
    merge_su,
    ran,
    su_initiator,
)


def oracle_ran(us, s, u):
    """Reachability by raw (refinement, outcome) enumeration."""
    hits = []
    for u2 in us.updates:
        if us.le_u(u, u2):
            r = us.apply_interp(u2, s)
            if r is not UNDEFINED and r not in hits:
                hits.append(r)
    return hits


# ---------------------------------------------------------------------------
# construction-time validation
# ---------------------------------------------------------------------------


def test_update_space_rejects_cyclic_order():
    with pytest.raises(UpdateSpaceError):
        UpdateSpace(["s"], ["a", "b"], [("a", "b"), ("b", "a")], [], [])


def test_update_space_rejects_unsound_merge():
    with pytest.raises(UpdateSpaceError):
        UpdateSpace(["s"], ["a", "b"], [], [("a", "b", "a")], [])


# ---------------------------------------------------------------------------
# ran
# ---------------------------------------------------------------------------


def test_ran_singleton_for_maximal_self_fixing_update():
    us = UpdateSpace(["s"], ["u"], [], [("u", "u", "u")], [("u", "s", "s")])
    assert ran(us, "s", "u") == ["s"]


def test_ran_of_least_update_reaches_most():
    us = dt_toy_space()
    bottom_reach = ran(us, "{}", "add-nothing")
    for u in us.updates:
        for r in ran(us, "{}", u):
            assert r in bottom_reach  # reachability is antitone in the update


def test_ran_matches_oracle_on_dt_toy():
    us = dt_toy_space()
    for s in us.states:
        for u in us.updates:
            assert ran(us, s, u) == oracle_ran(us, s, u)


# ---------------------------------------------------------------------------
# generated domain
# ---------------------------------------------------------------------------


def test_generated_domain_satisfies_order_axioms_for_every_enumerated_space():
    # merge soundness is G1's business, and an accidental global least
    # need not satisfy the bottom convention; everything else must hold
    tolerated = {"merge-sound", "least-is-identical-update"}
    count = 0
    for us in enumerate_update_spaces():
        p = gen_iposet(us)
        report = verify_iposet(p)
        assert not [v for v in report.violations if v.axiom not in tolerated], us
        count += 1
    assert count >= 100


def test_pair_is_identical_update_iff_interp_fixes_origin():
    us = dt_toy_space()
    p = gen_iposet(us)
    for s in us.states:
        for u in us.updates:
            expected = us.apply_interp(u, s) == s
            assert p.ident(Pair(s, u), Proper(s)) == expected


def test_proper_states_are_discrete():
    us = dt_toy_space()
    p = gen_iposet(us)
    for s in us.states:
        for s2 in us.states:
            assert p.le(Proper(s), Proper(s2)) == (s == s2)


# ---------------------------------------------------------------------------
# merge and apply
# ---------------------------------------------------------------------------


def test_merge_su_clauses():
    us = dt_toy_space()
    empty, full = "{}", "{k=r}"
    assert merge_su(us, Proper(empty), Proper(empty)) == Proper(empty)
    assert merge_su(us, Proper(empty), Proper(full)) is UNDEFINED
    assert merge_su(us, Pair(empty, "add-k"), Proper(full)) == Proper(full)
    assert merge_su(us, Pair(empty, "add-k"), Proper(empty)) is UNDEFINED
    assert merge_su(us, Pair(empty, "add-nothing"), Pair(empty, "del-k")) == Pair(empty, "del-k")
    assert merge_su(us, Pair(empty, "add-k"), Pair(full, "add-k")) is UNDEFINED  # distinct origins


def test_apply_su_clauses():
    us = dt_toy_space()
    empty, full = "{}", "{k=r}"
    assert apply_su(us, Proper(full), empty) == full
    assert apply_su(us, Pair(empty, "add-k"), empty) == full
    assert apply_su(us, Pair(empty, "add-k"), full) is UNDEFINED  # origin mismatch


def test_su_initiator_is_well_behaved_and_satisfies_u_laws():
    us = dt_toy_space()
    lens = su_initiator(us)
    assert check_law(lens, LawId.WB).holds

    def apply(v, sp):
        r = apply_su(us, v, sp.state)
        return UNDEFINED if r is UNDEFINED else Proper(r)

    states = lens.source.elements
    deltas = lens.view.elements
    assert check_u_acceptability(lens.view, apply, states, deltas).ok
    assert check_u_consistency(lens.view, apply, states, deltas).ok


def test_su_initiator_put_failure_on_origin_mismatch():
    us = dt_toy_space()
    lens = su_initiator(us)
    r = lens.put(Proper("{k=r}"), Pair("{}", "add-k"))
    assert is_failure(r)


def test_su_initiator_u_laws_hold_across_enumerated_spaces():
    checked = 0
    for us in itertools.islice(enumerate_update_spaces(), 40):
        view = gen_iposet(us)
        propers = [Proper(s) for s in us.states]

        def apply(v, sp):
            r = apply_su(us, v, sp.state)
            return UNDEFINED if r is UNDEFINED else Proper(r)

        assert check_u_acceptability(view, apply, propers, view.elements).ok
        assert check_u_consistency(view, apply, propers, view.elements).ok
        checked += 1
    assert checked == 40


# ---------------------------------------------------------------------------
# conditions G1..G3 and the duplicability lemma
# ---------------------------------------------------------------------------


def test_dt_toy_satisfies_all_conditions_and_is_duplicable():
    us = dt_toy_space()
    for which in ["G1", "G2", "G3"]:
        assert check_condition(us, which).ok, which
    assert check_duplicable(gen_iposet(us)).ok


def test_g1_violation_fixture():
    us = g1_violation_space()
    assert not check_condition(us, "G1").ok
    assert check_condition(us, "G2").ok
    assert check_condition(us, "G3").ok
    assert not check_duplicable(gen_iposet(us)).ok


def test_g2_violation_fixture():
    us = g2_violation_space()
    assert check_condition(us, "G1").ok
    assert not check_condition(us, "G2").ok
    assert check_condition(us, "G3").ok
    assert not check_duplicable(gen_iposet(us)).ok


def test_g3_violation_fixture():
    us = g3_violation_space()
    assert check_condition(us, "G1").ok
    assert check_condition(us, "G2").ok
    report = check_condition(us, "G3")
    assert not report.ok
    assert any(v.axiom == "G3-total-on-fixers" for v in report.violations)
    assert not check_duplicable(gen_iposet(us)).ok


def test_conditions_imply_duplicability_on_enumerated_spaces():
    satisfied = 0
    for us in enumerate_update_spaces():
        if all(check_condition(us, w).ok for w in ["G1", "G2", "G3"]):
            satisfied += 1
            assert check_duplicable(gen_iposet(us)).ok, dump_update_space(us)
    assert satisfied >= 20


def test_conditions_hold_vacuously_without_updates():
    us = UpdateSpace(["s1", "s2"], [], [], [], [], name="no-updates")
    for which in ["G1", "G2", "G3"]:
        assert check_condition(us, which).ok
    p = gen_iposet(us)
    assert verify_iposet(p).ok and check_duplicable(p).ok


def test_unknown_condition_name():
    with pytest.raises(ValueError):
        check_condition(dt_toy_space(), "G4")


# ---------------------------------------------------------------------------
# sufficient conditions
# ---------------------------------------------------------------------------


def test_fine_enough_implies_g1_on_enumerated_spaces():
    checked = 0
    for us in enumerate_update_spaces():
        if check_sufficient(us, "fine-enough").ok:
            checked += 1
            assert check_condition(us, "G1").ok
    assert checked >= 20


def test_associative_join_implies_g2_on_enumerated_spaces():
    checked = 0
    for us in enumerate_update_spaces():
        if check_sufficient(us, "associative-join").ok:
            checked += 1
            assert check_condition(us, "G2").ok
    assert checked >= 20


def test_g1_violation_space_is_not_fine_enough():
    assert not check_sufficient(g1_violation_space(), "fine-enough").ok


def test_non_associative_merge_reported_with_witness_triple():
    us = UpdateSpace(
        states=["s"],
        updates=["a", "b", "t"],
        u_le=[("a", "t"), ("b", "t")],
        u_merge=[(u, u, u) for u in ["a", "b", "t"]]
        + [("a", "t", "t"), ("t", "a", "t"), ("b", "t", "t"), ("t", "b", "t")],
        interp=[],
        name="non-assoc",
    )
    report = check_sufficient(us, "associative-join")
    assert not report.ok
    witnesses = [v for v in report.violations if v.axiom == "merge-associative"]
    assert witnesses and len(witnesses[0].witness) == 3


# ---------------------------------------------------------------------------
# origin erasure
# ---------------------------------------------------------------------------


def test_state_elimination_passes_on_dt_toy():
    report = check_state_elimination(dt_toy_space())
    assert report.ok, str(report)


def test_state_elimination_rejects_g1_style_spaces():
    report = check_state_elimination(g1_violation_space())
    assert not report.ok


def test_erase_maps_pairs_to_updates():
    assert erase(Pair("s", "u")) == Upd("u")
    assert erase(Proper("s")) == Proper("s")


def test_erased_merge_agrees_under_erasure_on_dt_toy():
    us = dt_toy_space()
    gen = gen_iposet(us)
    erased = erased_iposet(us)
    for a, b in itertools.product(gen.elements, repeat=2):
        r = merge_su(us, a, b)
        if r is not UNDEFINED:
            assert erased.merge(erase(a), erase(b)) == erase(r)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def test_update_space_text_round_trip():
    us = dt_toy_space()
    text = dump_update_space(us)
    again = load_update_space(text, name=us.name)
    assert again.states == us.states and again.updates == us.updates
    assert dump_update_space(again) == text


def test_update_space_parse_error():
    with pytest.raises(UpdateSpaceError):
        load_update_space("state s\nbogus x y\n")
