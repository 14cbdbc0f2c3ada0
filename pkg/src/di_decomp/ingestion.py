"""Data ingestion: survey-expectations API client and market CSV contracts.

The expectations client speaks the public OData dialect of the Central Bank
of Brazil's open-data service for annual market expectations (median
statistic only).  Pagination follows server-driven ``@odata.nextLink``
when present and falls back to ``$skip``/``$top`` paging; transient
failures are retried with exponential backoff.  All tests run against
recorded payloads through the injectable ``transport`` callable, never the
live service.

Market data arrives as CSV only: header row, first column ``date`` in
ISO-8601, remaining columns point-decimal reals.  An empty cell means "no
observation for that series on that date" (series keep independent
calendars); any non-empty cell that does not parse rejects the row, fatally
in strict mode.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
import time
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import FetchError, ParseError, SchemaError
from .series import DailySeries, Frame, TradingDate

log = logging.getLogger(__name__)

INDICATORS = ("IPCA", "Selic", "PIB", "Primario", "Nominal")
HORIZONS = (0, 1, 2, 3)

# Query names used by the open-data service for each indicator.
INDICATOR_QUERY_NAMES: dict[str, str] = {
    "IPCA": "IPCA",
    "Selic": "Selic",
    "PIB": "PIB Total",
    "Primario": "Resultado primário",
    "Nominal": "Resultado nominal",
}

DEFAULT_ENDPOINT = (
    "https://olinda.bcb.gov.br/olinda/servico/Expectativas/"
    "versao/v1/odata/ExpectativasMercadoAnuais"
)

MARKET_COLUMNS = ("DI5Y", "CDS", "DXY", "CRB", "VIX", "UST10", "SURPRISE")

__all__ = [
    "INDICATORS",
    "HORIZONS",
    "MARKET_COLUMNS",
    "DEFAULT_ENDPOINT",
    "FocusRecord",
    "FocusPanel",
    "LoadReport",
    "MarketDataset",
    "horizon_column",
    "horizon_columns",
    "fetch_focus",
    "reshape_horizons",
    "load_market_csv",
    "write_market_csv",
    "frame_to_csv",
    "read_frame_csv",
    "write_focus_panel_csv",
    "read_focus_panel_csv",
]


def horizon_column(indicator: str, k: int) -> str:
    """Column name for an indicator's expectation k calendar years ahead."""
    return f"{indicator}_year" if k == 0 else f"{indicator}_year_{k}"


def horizon_columns() -> tuple[str, ...]:
    """The 20 horizon columns, indicator-major, nearest horizon first."""
    return tuple(horizon_column(ind, k) for ind in INDICATORS for k in HORIZONS)


HORIZON_COLUMNS = horizon_columns()


@dataclass(frozen=True)
class FocusRecord:
    survey_date: TradingDate
    indicator: str
    reference_year: int
    median: float


@dataclass(frozen=True)
class FocusPanel:
    """Unique (survey_date, indicator, reference_year) -> median expectations."""

    records: tuple[FocusRecord, ...]

    def __post_init__(self) -> None:
        ordered = tuple(
            sorted(self.records, key=lambda r: (r.survey_date, r.indicator, r.reference_year))
        )
        object.__setattr__(self, "records", ordered)
        seen = set()
        for r in ordered:
            key = (r.survey_date, r.indicator, r.reference_year)
            if key in seen:
                raise SchemaError(f"duplicate panel cell {key}")
            seen.add(key)
            if r.reference_year < r.survey_date.year:
                raise SchemaError(
                    f"reference year {r.reference_year} precedes survey date "
                    f"{r.survey_date}"
                )

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class LoadReport:
    """Counts accumulated across ingestion steps, emitted as JSON."""

    fetched: int = 0
    deduplicated: int = 0
    dropped_dates: int = 0
    rejected_rows: int = 0

    def to_dict(self) -> dict:
        return {
            "fetched": self.fetched,
            "deduplicated": self.deduplicated,
            "dropped_dates": self.dropped_dates,
            "rejected_rows": self.rejected_rows,
        }

    def write(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class MarketDataset:
    """Named daily series, one per market variable, independent calendars."""

    series: tuple[DailySeries, ...]

    def __post_init__(self) -> None:
        names = [s.name for s in self.series]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate series names in dataset: {names}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.series)

    def __getitem__(self, name: str) -> DailySeries:
        for s in self.series:
            if s.name == name:
                return s
        raise SchemaError(f"no series '{name}' in dataset {list(self.names)}")


# ---------------------------------------------------------------------------
# Expectations API client
# ---------------------------------------------------------------------------

Transport = Callable[[str], tuple[int, bytes]]


def _requests_transport(url: str) -> tuple[int, bytes]:
    import requests

    resp = requests.get(url, timeout=60)
    return resp.status_code, resp.content


def _fetch_page(
    url: str,
    transport: Transport,
    max_attempts: int,
    backoff_s: float,
    sleep: Callable[[float], None],
) -> dict:
    last_status: int | None = None
    last_exc: Exception | None = None
    for attempt in range(max_attempts):
        if attempt:
            sleep(backoff_s * 2 ** (attempt - 1))
        try:
            status, body = transport(url)
        except Exception as exc:  # connectivity problems are transient
            last_exc, last_status = exc, None
            continue
        if status >= 500:
            last_status, last_exc = status, None
            continue
        if status != 200:
            raise FetchError(f"GET {url} returned status {status}")
        try:
            payload = json.loads(body)
        except ValueError as exc:
            raise ParseError(f"GET {url}: response is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("value"), list):
            raise ParseError(f"GET {url}: payload lacks a 'value' record list")
        return payload
    detail = f"status {last_status}" if last_status is not None else f"error {last_exc}"
    raise FetchError(
        f"GET {url} failed after {max_attempts} attempts (last: {detail})"
    )


def _parse_record(item: object, reverse_names: Mapping[str, str]) -> FocusRecord:
    if not isinstance(item, dict):
        raise ParseError(f"malformed expectations record (not an object): {item!r}")
    try:
        raw_ind = item["Indicador"]
        raw_date = item["Data"]
        raw_ref = item["DataReferencia"]
        raw_median = item["Mediana"]
    except KeyError as exc:
        raise ParseError(f"malformed expectations record, missing {exc}: {item!r}") from exc
    if raw_ind not in reverse_names:
        raise ParseError(f"unknown indicator {raw_ind!r} in record: {item!r}")
    try:
        survey_date = dt.date.fromisoformat(str(raw_date))
        reference_year = int(str(raw_ref))
        median = float(raw_median)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed expectations record ({exc}): {item!r}") from exc
    if not np.isfinite(median):
        raise ParseError(f"non-finite median in record: {item!r}")
    return FocusRecord(survey_date, reverse_names[raw_ind], reference_year, median)


def fetch_focus(
    indicators: Sequence[str],
    date_range: tuple[TradingDate, TradingDate],
    endpoint: str = DEFAULT_ENDPOINT,
    *,
    transport: Transport | None = None,
    page_size: int = 10_000,
    max_attempts: int = 4,
    backoff_s: float = 0.5,
    sleep: Callable[[float], None] = time.sleep,
    report: LoadReport | None = None,
) -> FocusPanel:
    """Fetch median annual expectations per (date, indicator, reference year).

    Parameters
    ----------
    indicators
        Subset of :data:`INDICATORS` to request.
    date_range
        Inclusive (start, end) survey-date window; must be non-empty.
    endpoint
        Base resource URL of the OData service.
    transport
        ``url -> (status, body)`` callable; defaults to a plain HTTP GET.
        Tests inject recorded payloads here.
    report
        Optional counter sink for fetched / deduplicated records.

    Duplicate (date, indicator, year) cells keep the last occurrence and
    log a warning.  The merged panel is sorted by date, indicator and
    reference year, so the result is deterministic for fixed server data.
    """
    start, end = date_range
    if start > end:
        raise FetchError(f"empty date range {start}..{end}")
    unknown = [i for i in indicators if i not in INDICATOR_QUERY_NAMES]
    if unknown:
        raise SchemaError(f"unknown indicators {unknown}; expected from {INDICATORS}")
    transport = transport or _requests_transport
    reverse_names = {v: k for k, v in INDICATOR_QUERY_NAMES.items()}

    cells: dict[tuple[TradingDate, str, int], FocusRecord] = {}
    duplicates = 0
    fetched = 0
    for indicator in indicators:
        query_name = INDICATOR_QUERY_NAMES[indicator].replace("'", "''")
        flt = (
            f"Indicador eq '{query_name}' and "
            f"Data ge '{start.isoformat()}' and Data le '{end.isoformat()}'"
        )
        params = {
            "$filter": flt,
            "$select": "Indicador,Data,DataReferencia,Mediana",
            "$orderby": "Data,DataReferencia",
            "$format": "json",
            "$top": str(page_size),
        }
        skip = 0
        url: str | None = f"{endpoint}?{urllib.parse.urlencode(params)}"
        while url is not None:
            payload = _fetch_page(url, transport, max_attempts, backoff_s, sleep)
            items = payload["value"]
            for item in items:
                record = _parse_record(item, reverse_names)
                key = (record.survey_date, record.indicator, record.reference_year)
                if key in cells:
                    duplicates += 1
                    log.warning("duplicate expectations cell %s, keeping last", key)
                cells[key] = record
                fetched += 1
            next_link = payload.get("@odata.nextLink")
            if next_link:
                url = str(next_link)
            elif len(items) == page_size:
                skip += page_size
                url = f"{endpoint}?{urllib.parse.urlencode({**params, '$skip': str(skip)})}"
            else:
                url = None
    if report is not None:
        report.fetched += fetched
        report.deduplicated += duplicates
    return FocusPanel(tuple(cells.values()))


def reshape_horizons(panel: FocusPanel, report: LoadReport | None = None) -> Frame:
    """Pivot a panel into the 20 horizon columns, one row per complete date.

    A survey date qualifies only if every indicator has a median for the
    reference years ``year(date) + k`` for k in 0..3; incomplete dates are
    dropped and counted in ``report.dropped_dates``.
    """
    if not panel.records:
        raise ParseError("reshape_horizons: empty panel")
    by_date: dict[TradingDate, dict[tuple[str, int], float]] = {}
    for r in panel.records:
        by_date.setdefault(r.survey_date, {})[(r.indicator, r.reference_year)] = r.median
    dates: list[TradingDate] = []
    rows: list[list[float]] = []
    dropped = 0
    for d in sorted(by_date):
        cells = by_date[d]
        try:
            row = [cells[(ind, d.year + k)] for ind in INDICATORS for k in HORIZONS]
        except KeyError:
            dropped += 1
            continue
        dates.append(d)
        rows.append(row)
    if report is not None:
        report.dropped_dates += dropped
    data = np.array(rows) if rows else np.empty((0, len(HORIZON_COLUMNS)))
    return Frame(tuple(dates), HORIZON_COLUMNS, data)


# ---------------------------------------------------------------------------
# CSV contracts
# ---------------------------------------------------------------------------


def _parse_cell(raw: str, line_no: int, column: str) -> float | None:
    text = raw.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError as exc:
        raise ParseError(
            f"line {line_no}: column '{column}': cannot parse {raw!r} "
            f"as a point-decimal real"
        ) from exc
    if not np.isfinite(value):
        raise ParseError(f"line {line_no}: column '{column}': non-finite value {raw!r}")
    return value


def _read_rows(
    path: Path | str,
    expected_header: Sequence[str],
    strict: bool,
    report: LoadReport | None,
) -> list[tuple[TradingDate, list[float | None]]]:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(expected_header):
            raise SchemaError(
                f"{path}: header {header} does not match expected {list(expected_header)}"
            )
        rows: list[tuple[TradingDate, list[float | None]]] = []
        seen_dates: set[TradingDate] = set()
        rejected = 0
        for line_no, raw in enumerate(reader, start=2):
            if not raw or all(not c.strip() for c in raw):
                continue
            try:
                if len(raw) != len(expected_header):
                    raise ParseError(
                        f"line {line_no}: expected {len(expected_header)} cells, got {len(raw)}"
                    )
                try:
                    date = dt.date.fromisoformat(raw[0].strip())
                except ValueError as exc:
                    raise ParseError(
                        f"line {line_no}: cannot parse date {raw[0]!r} as ISO-8601"
                    ) from exc
                if date in seen_dates:
                    raise ParseError(f"line {line_no}: duplicate date {date}")
                values = [
                    _parse_cell(cell, line_no, expected_header[i + 1])
                    for i, cell in enumerate(raw[1:])
                ]
            except ParseError as exc:
                if strict:
                    raise ParseError(f"{path}: {exc}") from exc
                rejected += 1
                log.warning("%s: rejected row: %s", path, exc)
                continue
            seen_dates.add(date)
            rows.append((date, values))
    if report is not None:
        report.rejected_rows += rejected
    rows.sort(key=lambda r: r[0])
    return rows


def load_market_csv(
    path: Path | str,
    columns: Sequence[str] = MARKET_COLUMNS,
    *,
    strict: bool = True,
    report: LoadReport | None = None,
) -> MarketDataset:
    """Load a market CSV into one series per column.

    The header must be exactly ``date`` followed by ``columns``.  Rows are
    sorted by date on load; unparseable cells reject the whole row (an
    error in strict mode, a counted warning otherwise); empty cells simply
    omit that date from the affected series.
    """
    rows = _read_rows(path, ["date", *columns], strict, report)
    series = []
    for j, name in enumerate(columns):
        pairs = [(d, vals[j]) for d, vals in rows if vals[j] is not None]
        series.append(
            DailySeries(
                name,
                tuple(d for d, _ in pairs),
                np.array([v for _, v in pairs], dtype=float),
            )
        )
    return MarketDataset(tuple(series))


def _format_value(v: float) -> str:
    return repr(float(v))


def write_market_csv(dataset: MarketDataset, path: Path | str) -> None:
    """Serialize a dataset to the market CSV contract (exact float round trip)."""
    all_dates = sorted({d for s in dataset.series for d in s.dates})
    index = [{d: i for i, d in enumerate(s.dates)} for s in dataset.series]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *dataset.names])
        for d in all_dates:
            row: list[str] = [d.isoformat()]
            for s, idx in zip(dataset.series, index):
                row.append(_format_value(s.values[idx[d]]) if d in idx else "")
            writer.writerow(row)


def frame_to_csv(frame: Frame, path: Path | str) -> None:
    """Write a frame as date + point-decimal columns (exact float round trip)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["date", *frame.names])
        for i, d in enumerate(frame.dates):
            writer.writerow([d.isoformat(), *(_format_value(v) for v in frame.data[i])])


def read_frame_csv(path: Path | str, *, strict: bool = True,
                   report: LoadReport | None = None) -> Frame:
    """Read a frame written by :func:`frame_to_csv` (all cells required)."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), None)
    if not header or header[0].strip() != "date":
        raise SchemaError(f"{path}: first header column must be 'date', got {header}")
    names = tuple(h.strip() for h in header[1:])
    rows = _read_rows(path, ["date", *names], strict, report)
    for d, vals in rows:
        if any(v is None for v in vals):
            raise ParseError(f"{path}: missing cell on {d}; frame files allow no gaps")
    dates = tuple(d for d, _ in rows)
    data = np.array([vals for _, vals in rows], dtype=float) if rows else np.empty((0, len(names)))
    return Frame(dates, names, data)


def write_focus_panel_csv(panel: FocusPanel, path: Path | str) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["survey_date", "indicator", "reference_year", "median"])
        for r in panel.records:
            writer.writerow(
                [r.survey_date.isoformat(), r.indicator, r.reference_year,
                 _format_value(r.median)]
            )


def read_focus_panel_csv(path: Path | str) -> FocusPanel:
    path = Path(path)
    if not path.exists():
        raise ParseError(f"file not found: {path}")
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["survey_date", "indicator", "reference_year", "median"]:
            raise SchemaError(f"{path}: unexpected panel header {header}")
        for line_no, raw in enumerate(reader, start=2):
            if not raw or all(not c.strip() for c in raw):
                continue
            try:
                records.append(
                    FocusRecord(
                        dt.date.fromisoformat(raw[0].strip()),
                        raw[1].strip(),
                        int(raw[2]),
                        float(raw[3]),
                    )
                )
            except (IndexError, ValueError) as exc:
                raise ParseError(f"{path}: line {line_no}: {exc}") from exc
    for r in records:
        if r.indicator not in INDICATORS:
            raise SchemaError(f"{path}: unknown indicator '{r.indicator}'")
    return FocusPanel(tuple(records))
