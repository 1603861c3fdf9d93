"""City catalogue: named ground-station sites loaded from YAML."""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .geo import EARTH, EarthModel, GeodeticPoint, arc_length, central_angle

# Published great-circle separations (km) the bundled catalogue must reproduce.
REFERENCE_DISTANCES_KM = {
    ("new_york", "dublin"): 5121.0,
    ("sao_paulo", "london"): 9514.0,
    ("toronto", "sydney"): 15585.0,
}
REFERENCE_REL_TOL = 0.01


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class CityCatalog(Mapping):
    entries: dict[str, GeodeticPoint]
    descriptions: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> GeodeticPoint:
        try:
            return self.entries[name]
        except KeyError:
            raise KeyError(f"unknown city {name!r}; catalogue has {sorted(self.entries)}") from None

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def distance_km(self, a: str, b: str, earth: EarthModel = EARTH) -> float:
        return arc_length(central_angle(self[a], self[b]), earth)

    def to_dict(self) -> dict:
        out = {}
        for name, p in self.entries.items():
            row = {"lat_deg": p.lat_deg, "lon_deg": p.lon_deg}
            if name in self.descriptions:
                row = {"exchange": self.descriptions[name], **row}
            out[name] = row
        return out


def parse_catalog(data, source: str = "<catalog>") -> CityCatalog:
    if not isinstance(data, dict) or not data:
        raise CatalogError(f"{source}: expected a non-empty mapping of city name -> coordinates")
    entries, desc = {}, {}
    for name, row in data.items():
        if not isinstance(row, dict):
            raise CatalogError(f"{source}: {name}: expected a mapping with lat_deg/lon_deg")
        try:
            entries[str(name)] = GeodeticPoint(float(row["lat_deg"]), float(row["lon_deg"]))
        except KeyError as exc:
            raise CatalogError(f"{source}: {name}: missing field {exc.args[0]}") from None
        except (TypeError, ValueError) as exc:
            raise CatalogError(f"{source}: {name}: {exc}") from None
        if "exchange" in row:
            desc[str(name)] = str(row["exchange"])
    return CityCatalog(entries, desc)


def validate_reference_distances(catalog: CityCatalog, earth: EarthModel = EARTH) -> None:
    for (a, b), ref in REFERENCE_DISTANCES_KM.items():
        d = catalog.distance_km(a, b, earth)
        if abs(d - ref) > REFERENCE_REL_TOL * ref:
            raise CatalogError(f"{a}-{b}: great-circle distance {d:.0f} km is not within 1% of {ref:.0f} km")


def load_catalog(path: str | Path | None = None) -> CityCatalog:
    """Load a catalogue file; with no path, the bundled one (checked against the reference distances)."""
    if path is None:
        text = resources.files("skyfiber.data").joinpath("cities.yaml").read_text()
        catalog = parse_catalog(yaml.safe_load(text), "cities.yaml")
        validate_reference_distances(catalog)
        return catalog
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise CatalogError(f"{path}: {exc}") from None
    return parse_catalog(data, str(path))
