"""Shared fixtures: the six-trace ls / ls -l worked example."""

from __future__ import annotations

import pytest

from iodfg.event_model import EventLog
from iodfg.mapping import MappingSpec
from iodfg.trace_parser import FileNameMeta, parse_trace_file

# rid -> pid offset keeps rid and pid visibly distinct, as with a forked child
PID_OFFSET = 1000

LS_RIDS = (9042, 9043, 9045)
LSL_RIDS = (9157, 9158, 9160)

USR_LIB_PATHS = (
    "/usr/lib/x86_64-linux-gnu/libselinux.so.1",
    "/usr/lib/x86_64-linux-gnu/libc.so.6",
    "/usr/lib/x86_64-linux-gnu/libpcre2-8.so.0",
)


def _line(pid: int, t_us: int, call: str, args: str, ret: str, dur_us: int) -> str:
    hh, rem = divmod(t_us, 3_600_000_000)
    mm, rem = divmod(rem, 60_000_000)
    ss, frac = divmod(rem, 1_000_000)
    return f"{pid} {hh:02d}:{mm:02d}:{ss:02d}.{frac:06d} {call}({args}) = {ret} <{dur_us // 1_000_000}.{dur_us % 1_000_000:06d}>"


def _read(pid, t, fd, path, size, dur, buf='""...'):
    return _line(pid, t, "read", f"{fd}<{path}>, {buf}, 4096", str(size), dur)


def _write(pid, t, path, size, dur):
    return _line(pid, t, "write", f'1<{path}>, "out"..., {size}', str(size), dur)


def ls_trace_lines(rid: int, base_us: int) -> list[str]:
    """Eight records: three /usr/lib reads, two /proc/filesystems reads,
    two /etc/locale.alias reads, one /dev/pts write."""
    pid = rid + PID_OFFSET
    t = base_us
    lines = []
    for path in USR_LIB_PATHS:
        lines.append(_read(pid, t, 3, path, 832, 12))
        t += 130
    lines.append(_read(pid, t, 4, "/proc/filesystems", 381, 7)); t += 130
    lines.append(_read(pid, t, 4, "/proc/filesystems", 0, 4)); t += 130
    lines.append(_read(pid, t, 5, "/etc/locale.alias", 2998, 12)); t += 130
    lines.append(_read(pid, t, 5, "/etc/locale.alias", 0, 5)); t += 130
    lines.append(_write(pid, t, "/dev/pts/0", 13, 21))
    return lines


def lsl_trace_lines(rid: int, base_us: int) -> list[str]:
    """Seventeen records, extending the ls sequence with nsswitch, passwd,
    group, locale and NSS library reads and three more terminal writes."""
    pid = rid + PID_OFFSET
    t = base_us
    lines = []
    for path in USR_LIB_PATHS:
        lines.append(_read(pid, t, 3, path, 832, 12))
        t += 130
    lines.append(_read(pid, t, 4, "/proc/filesystems", 381, 7)); t += 130
    lines.append(_read(pid, t, 4, "/proc/filesystems", 0, 4)); t += 130
    lines.append(_read(pid, t, 5, "/etc/locale.alias", 2998, 12)); t += 130
    lines.append(_read(pid, t, 5, "/etc/locale.alias", 0, 5)); t += 130
    lines.append(_read(pid, t, 6, "/etc/nsswitch.conf", 542, 9)); t += 130
    lines.append(_read(pid, t, 6, "/etc/nsswitch.conf", 0, 4)); t += 130
    lines.append(_read(pid, t, 7, "/etc/passwd", 2941, 10)); t += 130
    lines.append(_read(pid, t, 8, "/etc/group", 1183, 8)); t += 130
    lines.append(_write(pid, t, "/dev/pts/0", 52, 18)); t += 130
    lines.append(_read(pid, t, 3, "/usr/lib/locale/locale-archive", 65536, 15)); t += 130
    lines.append(_read(pid, t, 3, "/usr/lib/x86_64-linux-gnu/libnss_files.so.2", 832, 11)); t += 130
    lines.append(_write(pid, t, "/dev/pts/0", 48, 17)); t += 130
    lines.append(_write(pid, t, "/dev/pts/0", 40, 16)); t += 130
    lines.append(_write(pid, t, "/dev/pts/0", 120, 19))
    return lines


def fixture_files() -> dict[str, list[str]]:
    """File name -> lines for all six cases of the worked example."""
    base = 36_901_000_100  # 10:15:01.000100
    files = {}
    for i, rid in enumerate(LS_RIDS):
        files[f"a_host1_{rid}.st"] = ls_trace_lines(rid, base + i * 1_000_000)
    for i, rid in enumerate(LSL_RIDS):
        files[f"b_host1_{rid}.st"] = lsl_trace_lines(rid, base + 5_000_000 + i * 1_000_000)
    return files


def parse_fixture_log(names: list[str] | None = None) -> EventLog:
    files = fixture_files()
    if names is not None:
        files = {n: files[n] for n in names}
    cases = []
    for name, lines in files.items():
        meta_parts = name[:-3].split("_")
        meta = FileNameMeta(meta_parts[0], meta_parts[1], int(meta_parts[2]))
        cases.append(parse_trace_file(meta, lines, source=name))
    return EventLog(tuple(cases))


@pytest.fixture
def ls_files_dir(tmp_path):
    trace_dir = tmp_path / "traces"
    trace_dir.mkdir()
    for name, lines in fixture_files().items():
        (trace_dir / name).write_text("\n".join(lines) + "\n", encoding="ascii")
    return trace_dir


@pytest.fixture
def full_log() -> EventLog:
    return parse_fixture_log()


@pytest.fixture
def ls_log() -> EventLog:
    return parse_fixture_log([f"a_host1_{r}.st" for r in LS_RIDS])


@pytest.fixture
def lsl_log() -> EventLog:
    return parse_fixture_log([f"b_host1_{r}.st" for r in LSL_RIDS])


@pytest.fixture
def fhat() -> MappingSpec:
    """Call plus path truncated to the top two directory levels."""
    return MappingSpec(depth=2)
