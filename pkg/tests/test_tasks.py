"""To-do scenario: domains, filters, pipeline, formats."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pslens.iposet import UNDEFINED, check_duplicable, join, materialize
from pslens.laws import LawId, check_law
from pslens.lens import check_u_acceptability, check_u_consistency, is_failure, Reason
from pslens.tasks import (
    Delta,
    DeltaDT,
    DeltaOG,
    ParseError,
    TaskRecord,
    apply_dt,
    dt_domain,
    dtdt_domain,
    dtog_domain,
    dump_delta,
    dump_tasks,
    enumerate_deltas,
    enumerate_dt_universe,
    enumerate_dtdt_universe,
    enumerate_og_universe,
    enumerate_tables,
    filter_ongoing,
    filter_today,
    init_tasks,
    load_delta,
    load_tasks,
    restrict_ongoing,
    task_pipeline,
    tasks_domain,
    upsert,
)

TODAY = "2025-04-01"
APR2 = "2025-04-02"


def rec(done, name, due):
    return TaskRecord(done, name, due)


S_TL = {
    "001": rec(False, "Buy milk", APR2),
    "002": rec(True, "Walk dog", TODAY),
    "003": rec(False, "Jog", TODAY),
}
EGG = rec(False, "Buy egg", TODAY)
STRETCH = rec(False, "Stretch", TODAY)
W_OG = Delta({"004": EGG})
W_DT = Delta({"003": STRETCH}, {"002"})
W_MERGED = Delta({"003": STRETCH, "004": EGG}, {"002"})
S_TL_PRIME = {**S_TL, "004": EGG}
S_TL_SECOND = {"001": S_TL["001"], "003": STRETCH, "004": EGG}

V_OG = {"001": S_TL["001"], "003": S_TL["003"]}
V_DT = {"002": S_TL["002"], "003": S_TL["003"]}
V_OG_PRIME = {**V_OG, "004": EGG}
V_DT_PRIME = {**V_DT, "004": EGG}
V_OG_SECOND = dict(S_TL_SECOND)
V_DT_SECOND = {"003": STRETCH, "004": EGG}


# ---------------------------------------------------------------------------
# records and deltas
# ---------------------------------------------------------------------------


def test_record_validation():
    with pytest.raises(ValueError):
        TaskRecord(False, "", TODAY)
    with pytest.raises(ValueError):
        TaskRecord(False, "x", "April 1st")


def test_delta_rejects_overlapping_instructions():
    with pytest.raises(ValueError):
        Delta({"a": EGG}, {"a"})
    with pytest.raises(ValueError):
        DeltaOG({"a": EGG}, {}, {"a"})
    with pytest.raises(ValueError):
        DeltaOG({}, {"a": EGG}, set())  # completion request must be completed


def test_upsert_semantics():
    assert upsert(S_TL, {}) == S_TL
    assert upsert(S_TL, {"004": EGG}) == S_TL_PRIME
    replaced = upsert(S_TL, {"003": STRETCH})
    assert replaced["003"] == STRETCH and replaced["001"] == S_TL["001"]


# ---------------------------------------------------------------------------
# applying deltas
# ---------------------------------------------------------------------------


def test_apply_dt_insert():
    assert apply_dt(W_OG, S_TL) == S_TL_PRIME


def test_apply_dt_merged():
    assert apply_dt(W_MERGED, S_TL) == S_TL_SECOND


def test_apply_dt_trivials():
    assert apply_dt(Delta(), S_TL) == S_TL
    assert apply_dt(dict(V_OG), S_TL) == V_OG  # proper state replaces outright


# ---------------------------------------------------------------------------
# the delta domain
# ---------------------------------------------------------------------------


def test_dt_merge_of_the_two_view_deltas():
    assert dt_domain().merge(W_OG, W_DT) == W_MERGED


def test_dt_least_element_is_empty_delta():
    dt = dt_domain()
    assert dt.least == Delta()
    for x in [S_TL, W_OG, W_MERGED, Delta()]:
        assert dt.le(Delta(), x)
        assert dt.ident(Delta(), x)
        assert dt.merge(Delta(), x) == x


def test_dt_least_below_everything_on_bounded_samples():
    dt = dt_domain()
    for x in enumerate_dt_universe(["a", "b"], [rec(False, "n", TODAY), rec(True, "m", APR2)]):
        assert dt.le(Delta(), x) and dt.ident(Delta(), x)


def test_dt_merge_conflicts():
    dt = dt_domain()
    assert dt.merge(Delta({"a": EGG}), Delta({}, {"a"})) is UNDEFINED
    assert dt.merge(Delta({"a": EGG}), Delta({"a": STRETCH})) is UNDEFINED
    assert dt.merge(S_TL, V_OG) is UNDEFINED  # distinct proper tables


def test_dt_delta_absorbs_into_realizing_table():
    dt = dt_domain()
    assert dt.merge(W_OG, S_TL_PRIME) == S_TL_PRIME
    assert dt.merge(S_TL_PRIME, W_OG) == S_TL_PRIME
    assert dt.merge(W_OG, S_TL) is UNDEFINED  # 004 not present in s_tl


def test_dt_identical_updates_require_no_deletes():
    dt = dt_domain()
    assert dt.ident(Delta({"003": S_TL["003"]}), S_TL)
    assert not dt.ident(Delta({}, {"009"}), S_TL)  # harmless delete is still an update
    assert dt.le(Delta({}, {"009"}), S_TL)


RECORDS = [rec(False, "n", TODAY), rec(True, "m", APR2)]


def test_dt_duplicability_at_small_scale():
    universe = enumerate_dt_universe(["a"], RECORDS)
    p = materialize(dt_domain(), universe, name="dt@small")
    assert check_duplicable(p).ok
    for a, b in itertools.product(universe, repeat=2):
        j = join(p, a, b)
        m = dt_domain().merge(a, b)
        assert (j is UNDEFINED) == (m is UNDEFINED)
        if m is not UNDEFINED:
            assert j == m


@st.composite
def deltas(draw):
    ids = ["a", "b", "c"]
    adds = draw(st.dictionaries(st.sampled_from(ids), st.sampled_from(RECORDS), max_size=3))
    remaining = [k for k in ids if k not in adds]
    deletes = draw(st.sets(st.sampled_from(remaining))) if remaining else set()
    return Delta(adds, deletes)


@given(deltas(), deltas())
def test_dt_merge_commutative(d1, d2):
    m12 = dt_domain().merge(d1, d2)
    m21 = dt_domain().merge(d2, d1)
    assert (m12 is UNDEFINED) == (m21 is UNDEFINED)
    if m12 is not UNDEFINED:
        assert m12 == m21


@given(deltas())
def test_dt_merge_idempotent(d):
    assert dt_domain().merge(d, d) == d


@settings(max_examples=60)
@given(deltas(), deltas(), deltas())
def test_dt_merge_associative_in_definedness(d1, d2, d3):
    dt = dt_domain()
    m23 = dt.merge(d2, d3)
    left = dt.merge(d1, m23) if m23 is not UNDEFINED else UNDEFINED
    m12 = dt.merge(d1, d2)
    right = dt.merge(m12, d3) if m12 is not UNDEFINED else UNDEFINED
    assert (left is UNDEFINED) == (right is UNDEFINED)
    if left is not UNDEFINED:
        assert left == right


# ---------------------------------------------------------------------------
# initiator
# ---------------------------------------------------------------------------


def test_init_tasks_reflects_deltas():
    lens = init_tasks()
    assert lens.put(S_TL, W_OG) == S_TL_PRIME
    assert lens.put(S_TL, W_MERGED) == S_TL_SECOND
    assert lens.put(S_TL, Delta()) == S_TL
    assert lens.get(S_TL) == S_TL


def test_init_tasks_u_laws_on_bounded_samples():
    tables = enumerate_tables(["a", "b"], RECORDS)
    universe = enumerate_dt_universe(["a", "b"], RECORDS)
    dt = dt_domain()
    assert check_u_acceptability(dt, apply_dt, tables, universe).ok
    assert check_u_consistency(dt, apply_dt, tables, universe).ok


def test_init_tasks_well_behaved_on_bounded_samples():
    tables = enumerate_tables(["a", "b"], RECORDS)
    universe = enumerate_dt_universe(["a", "b"], RECORDS)
    report = check_law(init_tasks(), LawId.WB, source=tables, view=universe)
    assert report.holds and report.universe.startswith("sampled")


# ---------------------------------------------------------------------------
# filters, plain
# ---------------------------------------------------------------------------


def test_plain_filter_gets_match_the_worked_example():
    f_og = filter_ongoing("plain")
    f_dt = filter_today("plain", TODAY)
    assert f_og.get(S_TL) == V_OG
    assert f_dt.get(S_TL) == V_DT
    assert f_dt.get(S_TL_SECOND) == V_DT_SECOND


def test_plain_filter_get_on_deltas_restricts_adds_only():
    f_og = filter_ongoing("plain")
    d = Delta({"a": rec(True, "done thing", TODAY), "b": EGG}, {"c"})
    assert f_og.get(d) == Delta({"b": EGG}, {"c"})


def test_plain_filter_put_passes_deltas_through():
    f_og = filter_ongoing("plain")
    assert f_og.put(S_TL, W_OG) == W_OG
    assert f_og.put(Delta(), W_OG) == W_OG  # source shape irrelevant for deltas
    assert f_og.put(S_TL, Delta()) == Delta()


def test_plain_filter_put_proper_view_upserts_over_hidden_rest():
    f_og = filter_ongoing("plain")
    v = {"001": S_TL["001"], "005": rec(False, "New", TODAY)}
    out = f_og.put(S_TL, v)
    assert out == {"001": S_TL["001"], "002": S_TL["002"], "005": v["005"]}


def test_plain_filter_guards():
    f_og = filter_ongoing("plain")
    done_view = {"002": S_TL["002"]}
    r = f_og.put(S_TL, done_view)  # proper view may not contain completed tasks
    assert is_failure(r) and r.reason is Reason.GUARD_FAILED
    r = f_og.put(W_OG, V_OG)  # proper view against a delta source
    assert is_failure(r) and r.reason is Reason.GUARD_FAILED
    r = f_og.put(S_TL, Delta({"a": rec(True, "done", TODAY)}))
    assert is_failure(r) and r.reason is Reason.GUARD_FAILED
    f_dt = filter_today("plain", TODAY)
    r = f_dt.put(S_TL, Delta({"a": rec(False, "later", APR2)}))
    assert is_failure(r) and r.reason is Reason.GUARD_FAILED


def test_plain_filters_pass_ps_laws_on_bounded_samples():
    universe = enumerate_dt_universe(["a", "b"], RECORDS)
    for lens in [filter_ongoing("plain"), filter_today("plain", TODAY)]:
        for law in [LawId.PS_ACCEPTABILITY, LawId.PS_CONSISTENCY, LawId.PS_STABILITY]:
            report = check_law(lens, law, source=universe, view=universe)
            assert report.holds, f"{lens.name} {report}"


# ---------------------------------------------------------------------------
# filters, elaborated
# ---------------------------------------------------------------------------


def test_elaborated_get_splits_delta_adds():
    f_og = filter_ongoing("elaborated")
    done = rec(True, "done thing", TODAY)
    d = Delta({"a": done, "b": EGG}, {"c"})
    assert f_og.get(d) == DeltaOG({"b": EGG}, {"a": done}, {"c"})
    assert f_og.get(S_TL) == V_OG

    f_dt = filter_today("elaborated", TODAY)
    later = rec(False, "later", APR2)
    d2 = Delta({"a": later, "b": EGG}, {"c"})
    assert f_dt.get(d2) == DeltaDT({"b": EGG}, {"a": later}, {"c"})


def test_elaborated_put_reunites_requests():
    f_og = filter_ongoing("elaborated")
    jog_done = rec(True, "Jog", TODAY)
    v = DeltaOG({}, {"003": jog_done}, {"001"})
    assert f_og.put(S_TL, v) == Delta({"003": jog_done}, {"001"})

    f_dt = filter_today("elaborated", TODAY)
    moved = rec(False, "Buy milk", APR2)
    assert f_dt.put(S_TL, DeltaDT({}, {"001": moved}, set())) == Delta({"001": moved}, set())


def test_elaborated_put_out_of_domain_values():
    f_dt = filter_today("elaborated", TODAY)
    r = f_dt.put(S_TL, DeltaDT({"a": rec(False, "later", APR2)}, {}, set()))
    assert is_failure(r) and r.reason is Reason.OUT_OF_DOMAIN  # adds must be due today


def test_elaborated_filters_pass_ps_laws_on_bounded_samples():
    source = enumerate_dt_universe(["a", "b"], RECORDS)
    og_view = enumerate_og_universe(["a", "b"], RECORDS)
    dt_view = enumerate_dtdt_universe(["a", "b"], RECORDS, TODAY)
    for lens, view in [
        (filter_ongoing("elaborated"), og_view),
        (filter_today("elaborated", TODAY), dt_view),
    ]:
        for law in [LawId.PS_ACCEPTABILITY, LawId.PS_CONSISTENCY, LawId.PS_STABILITY]:
            report = check_law(lens, law, source=source, view=view)
            assert report.holds, f"{lens.name} {report}"


def test_fine_intent_distinction_in_ongoing_view():
    """Completion and deletion requests differ as elements even when no
    proper table can tell them apart."""
    dom = dtog_domain()
    done = rec(True, "done thing", TODAY)
    complete_k = DeltaOG({}, {"k": done}, set())
    delete_k = DeltaOG({}, {}, {"k"})
    assert complete_k != delete_k
    tables = enumerate_tables(["k", "j"], [r for r in RECORDS if not r.done])
    for t in tables:
        assert dom.le(complete_k, t) == dom.le(delete_k, t)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def test_pipeline_get_produces_both_views():
    lens = task_pipeline("plain", TODAY)
    assert lens.get(S_TL) == (V_OG, V_DT)


def test_pipeline_put_single_view_update():
    lens = task_pipeline("plain", TODAY)
    out = lens.put(S_TL, (W_OG, Delta()))
    assert out == S_TL_PRIME
    v_og2, v_dt2 = lens.get(out)
    assert (v_og2, v_dt2) == (V_OG_PRIME, V_DT_PRIME)
    assert dt_domain().le(W_OG, v_og2)


def test_pipeline_put_simultaneous_updates():
    lens = task_pipeline("plain", TODAY)
    out = lens.put(S_TL, (W_OG, W_DT))
    assert out == S_TL_SECOND
    v_og2, v_dt2 = lens.get(out)
    assert (v_og2, v_dt2) == (V_OG_SECOND, V_DT_SECOND)
    assert dt_domain().le(W_OG, v_og2)
    assert dt_domain().le(W_DT, v_dt2)


def test_pipeline_merge_conflict_surfaces_from_dup():
    lens = task_pipeline("plain", TODAY)
    r = lens.put(S_TL, (Delta({"x": EGG}), Delta({}, {"x"})))
    assert is_failure(r) and r.reason is Reason.MERGE_CONFLICT


def test_pipeline_elaborated_complete_and_delete():
    lens = task_pipeline("elaborated", TODAY)
    jog_done = rec(True, "Jog", TODAY)
    out = lens.put(S_TL, (DeltaOG({}, {"003": jog_done}, {"001"}), DeltaDT()))
    assert out == {"002": S_TL["002"], "003": jog_done}
    # the completion intention is preserved in the refreshed ongoing view
    v_og2, _ = lens.get(out)
    assert dtog_domain().le(DeltaOG({}, {"003": jog_done}, {"001"}), v_og2)


def test_pipeline_preserves_updates_end_to_end_on_samples():
    """For every sampled source and delta pair with a defined put, each
    view delta sits below its refreshed view."""
    lens = task_pipeline("plain", TODAY)
    dt = dt_domain()
    tables = enumerate_tables(["a", "b"], RECORDS)
    ds = enumerate_deltas(["a"], RECORDS) + [Delta({}, {"b"})]
    checked = 0
    for t in tables:
        for d_og, d_dt in itertools.product(ds, repeat=2):
            out = lens.put(t, (d_og, d_dt))
            if is_failure(out):
                continue
            v_og2, v_dt2 = lens.get(out)
            assert dt.le(d_og, v_og2), (t, d_og, d_dt)
            assert dt.le(d_dt, v_dt2), (t, d_og, d_dt)
            checked += 1
    assert checked > 100


def test_pipeline_well_behaved_on_tiny_universe():
    lens = task_pipeline("plain", TODAY)
    mini = enumerate_dt_universe(["a"], [RECORDS[0]])
    tables = enumerate_tables(["a"], [RECORDS[0]])
    pairs = [(x, y) for x in mini for y in mini]
    report = check_law(lens, LawId.WB, source=tables, view=pairs)
    assert report.holds, str(report)


# ---------------------------------------------------------------------------
# formats
# ---------------------------------------------------------------------------


def test_tasks_round_trip_and_canonical_order():
    text = dump_tasks(S_TL)
    assert text.splitlines()[0].startswith("task 001")
    assert load_tasks(text) == S_TL
    assert dump_tasks(load_tasks(text)) == text


def test_tasks_quoting():
    tricky = {"a": rec(False, 'say "hi" \\ there', TODAY)}
    assert load_tasks(dump_tasks(tricky)) == tricky


def test_tasks_parse_errors():
    with pytest.raises(ParseError):
        load_tasks("task 001 maybe x 2025-01-01\n")
    with pytest.raises(ParseError):
        load_tasks("task 001 false \"a\" 2025-01-01\ntask 001 false \"b\" 2025-01-01\n")
    with pytest.raises(ParseError):
        load_tasks("wibble\n")


def test_delta_round_trips_all_shapes():
    d = Delta({"004": EGG}, {"002"})
    assert load_delta(dump_delta(d), "plain") == d
    og = DeltaOG({"004": EGG}, {"003": rec(True, "Jog", TODAY)}, {"001"})
    assert load_delta(dump_delta(og), "ongoing") == og
    dt = DeltaDT({"004": EGG}, {"001": rec(False, "Buy milk", APR2)}, {"002"})
    assert load_delta(dump_delta(dt), "today") == dt


def test_delta_shape_mismatch_is_parse_error():
    og = DeltaOG({}, {"003": rec(True, "Jog", TODAY)}, set())
    with pytest.raises(ParseError):
        load_delta(dump_delta(og), "plain")
    with pytest.raises(ParseError):
        load_delta("upsert a false \"x\" 2025-01-01\ndelete a\n", "plain")
