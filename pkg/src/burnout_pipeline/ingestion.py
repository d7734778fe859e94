"""Note-file and workload-table ingestion plus the service->specialty map."""

import csv
import json
import logging
import re
from dataclasses import dataclass

from . import resources

log = logging.getLogger(__name__)

OTHER_SPECIALTY = "OTHER"

_SERVICE_LINE_RE = re.compile(r"^\s*service:(.*)$", re.IGNORECASE)


class IngestError(Exception):
    """Fatal ingestion failure (unreadable file, duplicate note ids)."""


@dataclass(frozen=True)
class RawNote:
    note_id: str
    provider_id: str
    text: str
    service_raw: str = ""
    chart_time: str = None


@dataclass(frozen=True)
class WorkloadRecord:
    provider_id: str
    lab_order_count: int = 0
    procedure_count: int = 0
    admission_count: int = 0
    mortality_count: int = 0
    mortality_rate: float = 0.0
    los_mean_days: float = 0.0
    los_median_days: float = 0.0


class SpecialtyMap:
    """Ordered first-match-wins regex rules onto 20 canonical specialties."""

    def __init__(self, rules):
        if not rules:
            raise IngestError("specialty map must contain at least one rule")
        self.rules = [(re.compile(pat, re.IGNORECASE), spec) for pat, spec in rules]

    @classmethod
    def load(cls, path=None):
        rows = resources.specialty_map_rows(path)
        return cls([(r["pattern"], r["specialty"]) for r in rows])


def parse_service_header(text):
    """Remainder of the first 'Service:' line, trimmed and uppercased."""
    for line in text.split("\n"):
        m = _SERVICE_LINE_RE.match(line)
        if m:
            return m.group(1).strip().upper()
    return ""


def map_specialty(service_raw, spec_map):
    if service_raw:
        for pattern, specialty in spec_map.rules:
            if pattern.search(service_raw):
                return specialty
    return OTHER_SPECIALTY


@dataclass(frozen=True)
class LoadReport:
    notes: tuple
    rejected_lines: tuple  # 1-based line numbers of malformed records


def load_notes(path):
    """Read JSONL notes; malformed lines are skipped with a warning,
    duplicate note ids abort."""
    notes = []
    rejected = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read notes file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                note_id = obj["note_id"]
                provider_id = obj["provider_id"]
                text = obj["text"]
            except (json.JSONDecodeError, KeyError, TypeError):
                log.warning("skipping malformed note line %d", lineno)
                rejected.append(lineno)
                continue
            if not isinstance(text, str) or not text.strip():
                log.warning("skipping empty-text note line %d", lineno)
                rejected.append(lineno)
                continue
            if note_id in seen:
                raise IngestError(f"duplicate note_id {note_id!r} at line {lineno}")
            seen.add(note_id)
            service = obj.get("service") or parse_service_header(text)
            notes.append(RawNote(
                note_id=str(note_id),
                provider_id=str(provider_id),
                text=text,
                service_raw=str(service or ""),
                chart_time=obj.get("chart_time"),
            ))
    return LoadReport(notes=tuple(notes), rejected_lines=tuple(rejected))


def _read_csv(path, required):
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read table {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            if any(row.get(k) in (None, "") for k in required):
                log.warning("%s: skipping malformed row at line %d", path, lineno)
                continue
            yield lineno, row


def _median(values):
    vals = sorted(values)
    n = len(vals)
    if n == 0:
        return 0.0
    mid = n // 2
    if n % 2:
        return vals[mid]
    return (vals[mid - 1] + vals[mid]) / 2.0


def build_workload(admissions_path, labevents_path, procedureevents_path):
    """Join the three activity tables into one WorkloadRecord per provider.

    All three provider-id columns share one identifier namespace; providers
    absent from a table get zeros for that table's fields.
    """
    lab_counts = {}
    for _, row in _read_csv(labevents_path, ["order_provider_id"]):
        pid = row["order_provider_id"]
        lab_counts[pid] = lab_counts.get(pid, 0) + 1

    proc_counts = {}
    for _, row in _read_csv(procedureevents_path, ["caregiver_id"]):
        pid = row["caregiver_id"]
        proc_counts[pid] = proc_counts.get(pid, 0) + 1

    adm_counts = {}
    mort_counts = {}
    los_values = {}
    for lineno, row in _read_csv(
        admissions_path, ["admit_provider_id", "hospital_expire_flag", "los_days"]
    ):
        pid = row["admit_provider_id"]
        try:
            expire = int(row["hospital_expire_flag"])
            los = float(row["los_days"])
        except ValueError:
            log.warning("admissions: skipping malformed row at line %d", lineno)
            continue
        if expire not in (0, 1):
            log.warning("admissions: skipping malformed row at line %d", lineno)
            continue
        if los < 0:
            log.warning("admissions line %d: negative LOS clamped to 0", lineno)
            los = 0.0
        adm_counts[pid] = adm_counts.get(pid, 0) + 1
        mort_counts[pid] = mort_counts.get(pid, 0) + expire
        los_values.setdefault(pid, []).append(los)

    providers = sorted(set(lab_counts) | set(proc_counts) | set(adm_counts))
    out = {}
    for pid in providers:
        adm = adm_counts.get(pid, 0)
        mort = mort_counts.get(pid, 0)
        los = los_values.get(pid, [])
        out[pid] = WorkloadRecord(
            provider_id=pid,
            lab_order_count=lab_counts.get(pid, 0),
            procedure_count=proc_counts.get(pid, 0),
            admission_count=adm,
            mortality_count=mort,
            mortality_rate=mort / adm if adm > 0 else 0.0,
            los_mean_days=sum(los) / len(los) if los else 0.0,
            los_median_days=_median(los),
        )
    return out
