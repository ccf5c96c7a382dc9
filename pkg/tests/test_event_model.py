"""Event-log model: bundle round-trip, filtering, selection, union."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iodfg.errors import CorruptBundle, DuplicateCase
from iodfg.event_model import (
    Case,
    CaseId,
    EventLog,
    filter_events,
    read_bundle,
    select_cases,
    union_logs,
    write_bundle,
)
from iodfg.trace_parser import Event

from conftest import LS_RIDS


def _event(case_id: CaseId, call="read", start=100, dur=5, fp="/usr/lib/a.so", size=832, seq=1):
    return Event(case_id.cid, case_id.host, case_id.rid, case_id.rid + 1, call, start, dur, fp, size, seq)


def _tiny_log() -> EventLog:
    cid_a = CaseId("a", "h", 1)
    cid_b = CaseId("b", "h", 2)
    return EventLog(
        (
            Case(cid_a, (_event(cid_a, seq=1), _event(cid_a, call="write", fp="/dev/pts/0", start=200, seq=2))),
            Case(cid_b, (_event(cid_b, fp='/tmp/with,comma "quoted"', size=None, seq=1),)),
        )
    )


class TestModel:
    def test_cases_sorted_and_unique(self):
        log = _tiny_log()
        assert [c.id.label() for c in log.cases] == ["a:h:1", "b:h:2"]
        with pytest.raises(DuplicateCase):
            EventLog((log.cases[0], log.cases[0]))

    def test_case_rejects_foreign_events(self):
        cid = CaseId("a", "h", 1)
        stray = _event(CaseId("x", "h", 9))
        with pytest.raises(ValueError):
            Case(cid, (stray,))

    def test_case_rejects_unsorted_events(self):
        cid = CaseId("a", "h", 1)
        with pytest.raises(ValueError):
            Case(cid, (_event(cid, start=200, seq=2), _event(cid, start=100, seq=1)))

    def test_no_two_events_identical(self, full_log):
        # seq makes events structurally unique even for repeated calls
        everything = [e for case in full_log.cases for e in case.events]
        assert len(set(everything)) == len(everything)


class TestBundle:
    def test_round_trip_worked_example(self, full_log, tmp_path):
        write_bundle(full_log, tmp_path / "bundle")
        assert read_bundle(tmp_path / "bundle") == full_log

    def test_round_trip_quoting_and_missing_size(self, tmp_path):
        log = _tiny_log()
        write_bundle(log, tmp_path / "b")
        assert read_bundle(tmp_path / "b") == log

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(CorruptBundle, match="manifest"):
            read_bundle(tmp_path)

    def test_manifest_lists_missing_case_file(self, full_log, tmp_path):
        bundle = tmp_path / "b"
        write_bundle(full_log, bundle)
        (bundle / "cases" / f"a_host1_{LS_RIDS[0]}.csv").unlink()
        with pytest.raises(CorruptBundle, match="missing case file"):
            read_bundle(bundle)

    def test_unsorted_rows(self, full_log, tmp_path):
        bundle = tmp_path / "b"
        write_bundle(full_log, bundle)
        path = bundle / "cases" / f"a_host1_{LS_RIDS[0]}.csv"
        lines = path.read_text().splitlines()
        lines[1], lines[2] = lines[2], lines[1]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptBundle, match="sorted"):
            read_bundle(bundle)

    def test_bad_header(self, full_log, tmp_path):
        bundle = tmp_path / "b"
        write_bundle(full_log, bundle)
        path = bundle / "cases" / f"a_host1_{LS_RIDS[0]}.csv"
        lines = path.read_text().splitlines()
        lines[0] = "seq,pid,call,start,dur,fp,size"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CorruptBundle, match="header"):
            read_bundle(bundle)

    def test_event_count_mismatch(self, full_log, tmp_path):
        bundle = tmp_path / "b"
        write_bundle(full_log, bundle)
        manifest = json.loads((bundle / "manifest.json").read_text())
        manifest[0]["event_count"] += 1
        (bundle / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(CorruptBundle, match="promises"):
            read_bundle(bundle)

    def test_no_floats_in_bundle(self, full_log, tmp_path):
        bundle = tmp_path / "b"
        write_bundle(full_log, bundle)
        for case_file in (bundle / "cases").iterdir():
            assert "." not in "".join(
                field
                for line in case_file.read_text().splitlines()[1:]
                for field in (line.split(",")[0], line.split(",")[3], line.split(",")[4])
            )


class TestQueries:
    def test_filter_restricts_to_usr_lib(self, ls_log):
        filtered = filter_events(ls_log, "/usr/lib")
        assert len(filtered.cases) == 3
        for case in filtered.cases:
            assert len(case.events) == 3
            assert all("/usr/lib" in e.fp for e in case.events)

    def test_filter_empty_substring_is_identity(self, ls_log):
        assert filter_events(ls_log, "") == ls_log

    def test_filter_no_match_keeps_empty_cases(self, ls_log):
        filtered = filter_events(ls_log, "zzz-not-present")
        assert len(filtered.cases) == 3
        assert all(case.events == () for case in filtered.cases)

    def test_select_cid_a(self, full_log, ls_log):
        selected = select_cases(full_log, lambda cid: cid.cid == "a")
        assert selected.case_labels() == ls_log.case_labels()
        assert len(selected.cases) == 3

    def test_select_true_false(self, full_log):
        assert select_cases(full_log, lambda cid: True) == full_log
        assert select_cases(full_log, lambda cid: False).cases == ()

    def test_select_partition_reunites(self, full_log):
        green = select_cases(full_log, lambda cid: cid.cid == "a")
        red = select_cases(full_log, lambda cid: cid.cid != "a")
        assert union_logs(green, red) == full_log

    def test_filter_and_select_commute(self, full_log):
        pred = lambda cid: cid.cid == "b"
        one = filter_events(select_cases(full_log, pred), "/etc")
        other = select_cases(filter_events(full_log, "/etc"), pred)
        assert one == other

    def test_union_disjoint_assoc_comm(self, full_log):
        a = select_cases(full_log, lambda cid: cid.cid == "a")
        b = select_cases(full_log, lambda cid: cid.cid == "b" and cid.rid == 9157)
        c = select_cases(full_log, lambda cid: cid.cid == "b" and cid.rid != 9157)
        assert union_logs(union_logs(a, b), c) == union_logs(a, union_logs(b, c))
        assert union_logs(b, a) == union_logs(a, b)

    def test_union_duplicate_rejected(self, full_log):
        with pytest.raises(DuplicateCase):
            union_logs(full_log, full_log)


_WORDS = st.text(alphabet="abcdefgh/._-", min_size=1, max_size=12)


@st.composite
def _logs(draw):
    n_cases = draw(st.integers(min_value=0, max_value=4))
    cases = []
    for i in range(n_cases):
        case_id = CaseId(draw(st.sampled_from("abc")), "h", i + 1)
        n_events = draw(st.integers(min_value=0, max_value=6))
        starts = sorted(draw(st.lists(st.integers(0, 10**7), min_size=n_events, max_size=n_events)))
        events = tuple(
            _event(
                case_id,
                call=draw(st.sampled_from(["read", "write", "lseek"])),
                start=starts[k],
                dur=draw(st.integers(0, 1000)),
                fp=draw(_WORDS),
                size=draw(st.one_of(st.none(), st.integers(0, 10**6))),
                seq=k + 1,
            )
            for k in range(n_events)
        )
        cases.append(Case(case_id, events))
    return EventLog(tuple(cases))


class TestProperties:
    @given(log=_logs())
    @settings(max_examples=60, deadline=None)
    def test_bundle_round_trip_identity(self, tmp_path_factory, log):
        bundle = tmp_path_factory.mktemp("bundle")
        write_bundle(log, bundle)
        assert read_bundle(bundle) == log

    @given(_logs(), st.sampled_from(["a", "/", "x", ""]))
    @settings(max_examples=60, deadline=None)
    def test_filter_select_commute(self, log, substring):
        pred = lambda cid: cid.cid in ("a", "b")
        assert filter_events(select_cases(log, pred), substring) == select_cases(
            filter_events(log, substring), pred
        )
