"""Synthetic strace-format workload generator with ground truth.

Emits one ``<cid>_<host>_<rid>.st`` file per process, shaped like a
parallel I/O benchmark: each process opens its write target, writes
``segments * blocks_per_segment`` operations of ``op_bytes``, then opens a
read target and reads the same number of operations back.  In SSF mode all
processes share one file; in FPP mode each process writes its own file and
reads its neighbor's.  The PLAIN interface issues an lseek before every
read and write; the POSITIONAL interface uses pread64/pwrite64 with no
lseek at all.

Timestamps are synthesized from a fixed per-op latency, gap and
per-process stagger, so concurrency statistics of the output are
predictable; a ``ground_truth.json`` sidecar records the byte and
operation totals per (call, path) and per case.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path

US_PER_SECOND = 1_000_000

MODES = ("ssf", "fpp")
INTERFACES = ("plain", "positional")


@dataclass(frozen=True)
class WorkloadSpec:
    processes: int
    mode: str
    interface: str
    segments: int = 3
    blocks_per_segment: int = 4
    op_bytes: int = 65536
    base_path: str = "/scratch/u1"
    seed: int = 0
    cid: str = "w"
    host: str = "host1"
    rid_base: int = 5001
    op_latency_us: int = 400
    meta_latency_us: int = 50
    gap_us: int = 100
    stagger_us: int = 137
    jitter_us: int = 0
    start_us: int = 10 * 3600 * US_PER_SECOND  # 10:00:00

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.interface not in INTERFACES:
            raise ValueError(f"interface must be one of {INTERFACES}")
        for name in ("processes", "segments", "blocks_per_segment", "op_bytes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if "_" in self.cid or "_" in self.host or not self.cid or not self.host:
            raise ValueError("cid and host must be non-empty and underscore-free")
        if not self.base_path.startswith("/"):
            raise ValueError("base_path must be absolute")

    @property
    def ops_per_phase(self) -> int:
        return self.segments * self.blocks_per_segment

    def target_path(self, proc: int) -> str:
        if self.mode == "ssf":
            return f"{self.base_path}/ssf/testfile"
        return f"{self.base_path}/fpp/testfile.{proc:05d}"

    @classmethod
    def from_json_dict(cls, data: dict) -> "WorkloadSpec":
        return cls(**data)

    def to_json_dict(self) -> dict:
        return asdict(self)


def _timestamp(us: int) -> str:
    if not 0 <= us < 24 * 3600 * US_PER_SECOND:
        raise ValueError("synthesized workload does not fit in one day")
    hh, rem = divmod(us, 3600 * US_PER_SECOND)
    mm, rem = divmod(rem, 60 * US_PER_SECOND)
    ss, frac = divmod(rem, US_PER_SECOND)
    return f"{hh:02d}:{mm:02d}:{ss:02d}.{frac:06d}"


def _dur(us: int) -> str:
    return f"<{us // US_PER_SECOND}.{us % US_PER_SECOND:06d}>"


class _GroundTruth:
    def __init__(self):
        self.activities: dict[str, dict[str, int]] = {}
        self.per_case: dict[str, dict[str, int]] = {}

    def record(self, case_label: str, call: str, path: str, size: int):
        activity = self.activities.setdefault(f"{call}:{path}", {"bytes": 0, "ops": 0})
        activity["bytes"] += size
        activity["ops"] += 1
        case = self.per_case.setdefault(
            case_label, {"read_bytes": 0, "write_bytes": 0, "ops": 0}
        )
        case["ops"] += 1
        if call in ("read", "pread64"):
            case["read_bytes"] += size
        elif call in ("write", "pwrite64"):
            case["write_bytes"] += size


class _ProcessClock:
    def __init__(self, start_us: int, gap_us: int):
        self.now = start_us
        self.gap = gap_us

    def op(self, dur_us: int) -> tuple[str, str]:
        stamp = _timestamp(self.now)
        self.now += dur_us + self.gap
        return stamp, _dur(dur_us)


def generate(spec: WorkloadSpec, outdir: Path | str) -> list[str]:
    """Write one trace file per process plus the ground-truth sidecar.

    Returns the trace file names, in process order.  Output is a pure
    function of the spec: the same seed yields byte-identical files.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    truth = _GroundTruth()
    positional = spec.interface == "positional"
    read_call = "pread64" if positional else "read"
    write_call = "pwrite64" if positional else "write"
    names = []
    for proc in range(spec.processes):
        rid = spec.rid_base + proc
        pid = rid + 1
        case_label = f"{spec.cid}:{spec.host}:{rid}"
        jitter = rng.randint(0, spec.jitter_us) if spec.jitter_us else 0
        clock = _ProcessClock(spec.start_us + proc * spec.stagger_us + jitter, spec.gap_us)
        write_path = spec.target_path(proc)
        read_path = spec.target_path((proc + 1) % spec.processes)
        lines = []

        def emit(call: str, args: str, ret: str, dur_us: int):
            stamp, dur = clock.op(dur_us)
            lines.append(f"{pid} {stamp} {call}({args}) = {ret} {dur}")

        def data_op(call: str, fd: int, path: str, offset: int):
            if positional:
                args = f'{fd}<{path}>, ""..., {spec.op_bytes}, {offset}'
            else:
                emit("lseek", f"{fd}<{path}>, {offset}, SEEK_SET", str(offset), spec.meta_latency_us)
                truth.record(case_label, "lseek", path, 0)
                args = f'{fd}<{path}>, ""..., {spec.op_bytes}'
            emit(call, args, str(spec.op_bytes), spec.op_latency_us)
            truth.record(case_label, call, path, spec.op_bytes)

        emit("openat", f'AT_FDCWD, "{write_path}", O_WRONLY|O_CREAT, 0644', f"3<{write_path}>", spec.meta_latency_us)
        truth.record(case_label, "openat", write_path, 0)
        for k in range(spec.ops_per_phase):
            data_op(write_call, 3, write_path, _offset(spec, proc, k))

        emit("openat", f'AT_FDCWD, "{read_path}", O_RDONLY', f"4<{read_path}>", spec.meta_latency_us)
        truth.record(case_label, "openat", read_path, 0)
        neighbor = (proc + 1) % spec.processes
        for k in range(spec.ops_per_phase):
            data_op(read_call, 4, read_path, _offset(spec, neighbor, k))

        name = f"{spec.cid}_{spec.host}_{rid}.st"
        (out / name).write_text("\n".join(lines) + "\n", encoding="ascii")
        names.append(name)

    sidecar = {
        "spec": spec.to_json_dict(),
        "files": names,
        "activities": truth.activities,
        "per_case": truth.per_case,
    }
    (out / "ground_truth.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return names


def _offset(spec: WorkloadSpec, proc: int, op_index: int) -> int:
    if spec.mode == "ssf":
        return (proc * spec.ops_per_phase + op_index) * spec.op_bytes
    return op_index * spec.op_bytes


def load_ground_truth(outdir: Path | str) -> dict:
    return json.loads((Path(outdir) / "ground_truth.json").read_text(encoding="utf-8"))
