"""The explorer's emission dataset: 43 countries, years 1960 through 2013.

Loaded from a ``country,year,value`` CSV; empty values mark missing cells. The
packaged table is synthetic fixture data with the real shape.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from typing import IO

from .errors import ConfigError

N_COUNTRIES = 43
FIRST_YEAR = 1960
LAST_YEAR = 2013
YEARS = tuple(range(FIRST_YEAR, LAST_YEAR + 1))


@dataclass(frozen=True)
class CountryRecord:
    code: str
    name: str


@dataclass(frozen=True)
class EmissionDataset:
    countries: tuple[CountryRecord, ...]
    values: dict[tuple[str, int], float]  # missing cells absent

    def __post_init__(self):
        if len(self.countries) != N_COUNTRIES:
            raise ConfigError(f"dataset must have {N_COUNTRIES} countries, got {len(self.countries)}")
        codes = {c.code for c in self.countries}
        if len(codes) != N_COUNTRIES:
            raise ConfigError("duplicate country codes")
        for (code, year), v in self.values.items():
            if code not in codes:
                raise ConfigError(f"value for unknown country {code!r}")
            if year not in YEARS:
                raise ConfigError(f"value for out-of-range year {year}")
            if v < 0:
                raise ConfigError(f"negative emission value for {code} {year}")

    @property
    def codes(self) -> tuple[str, ...]:
        return tuple(c.code for c in self.countries)

    def value(self, code: str, year: int) -> float | None:
        return self.values.get((code, year))

    def series(self, code: str) -> list[tuple[int, float]]:
        return [(y, self.values[(code, y)]) for y in YEARS if (code, y) in self.values]


def _read_countries(fh: IO[str]) -> tuple[CountryRecord, ...]:
    reader = csv.DictReader(fh)
    return tuple(CountryRecord(row["code"], row["name"]) for row in reader)


def load_dataset(
    emissions_path: str | None = None, countries_path: str | None = None
) -> EmissionDataset:
    """Load the packaged dataset, or override either file."""
    if countries_path is not None:
        with open(countries_path, encoding="utf-8") as fh:
            countries = _read_countries(fh)
    else:
        with resources.files("trailnote.data").joinpath("countries.csv").open("r") as fh:
            countries = _read_countries(fh)

    values: dict[tuple[str, int], float] = {}

    def consume(fh: IO[str]) -> None:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["country", "year", "value"]:
            raise ConfigError(f"emission table header must be country,year,value, got {reader.fieldnames}")
        for row in reader:
            raw = row["value"].strip()
            if raw:
                values[(row["country"], int(row["year"]))] = float(raw)

    if emissions_path is not None:
        with open(emissions_path, encoding="utf-8") as fh:
            consume(fh)
    else:
        with resources.files("trailnote.data").joinpath("emissions.csv").open("r") as fh:
            consume(fh)
    return EmissionDataset(countries=countries, values=values)
