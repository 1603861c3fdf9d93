import textwrap

import pytest
import yaml

from skyfiber.catalog import CatalogError, load_catalog, parse_catalog, validate_reference_distances
from skyfiber.compare import OftnConfig
from skyfiber.config import ConfigError, ExperimentConfig, config_from_dict, load_config


# -- city catalogue -------------------------------------------------------------


@pytest.mark.parametrize(
    "a, b, km", [("new_york", "dublin", 5121.0), ("sao_paulo", "london", 9514.0), ("toronto", "sydney", 15585.0)]
)
def test_bundled_catalogue_reproduces_published_separations(a, b, km):
    assert load_catalog().distance_km(a, b) == pytest.approx(km, rel=5e-4)


def test_catalogue_lookup_and_round_trip():
    cat = load_catalog()
    assert len(cat) == 6 and "london" in cat
    assert cat.descriptions["london"] == "London Stock Exchange"
    again = parse_catalog(cat.to_dict())
    assert again.entries == cat.entries
    with pytest.raises(KeyError, match="unknown city"):
        cat["atlantis"]


@pytest.mark.parametrize(
    "data",
    [{}, {"x": 3}, {"x": {"lat_deg": 10.0}}, {"x": {"lat_deg": 100.0, "lon_deg": 0.0}}, {"x": {"lat_deg": "n", "lon_deg": 0}}],
)
def test_bad_catalogues_are_rejected(data):
    with pytest.raises(CatalogError):
        parse_catalog(data)


def test_reference_validation_catches_moved_city():
    d = load_catalog().to_dict()
    d["dublin"]["lon_deg"] = 10.0
    with pytest.raises(CatalogError, match="new_york-dublin"):
        validate_reference_distances(parse_catalog(d))


def test_catalogue_file_from_disk(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("a: {lat_deg: 1, lon_deg: 2}\nb: {lat_deg: 3, lon_deg: 4}\n")
    assert load_catalog(p)["b"].lon_deg == 4.0


# -- experiment config ----------------------------------------------------------


def test_default_config_is_the_reference_experiment():
    cfg = load_config()
    assert [o.refractive_index for o in cfg.oftns] == [1.1, 1.3, 1.4675]
    assert [w.altitude_km for w in cfg.owsns] == [300.0, 550.0, 1100.0]
    assert [c.name for c in cfg.connections] == ["New York-Dublin", "Sao Paulo-London", "Toronto-Sydney"]
    assert cfg.simulation.duration_s == 3600.0 and cfg.simulation.dt_s == 1.0


def test_dump_round_trips(tmp_path):
    cfg = load_config()
    cfg.oftns = [OftnConfig("slow", 1.6, 0.05)]
    p = tmp_path / "c.yaml"
    p.write_text(cfg.dump())
    assert load_config(p) == cfg
    assert yaml.safe_load(load_config(p).dump()) == yaml.safe_load(cfg.dump())


def test_partial_config_and_custom_cities(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(
        textwrap.dedent(
            """
            cities:
              perth: {lat_deg: -31.95, lon_deg: 115.86}
            oftns: [{name: F, refractive_index: 1.45}]
            owsns: []
            connections: [{name: Perth-London, city_a: perth, city_b: london}]
            simulation: {duration_s: 10, dt_s: 2}
            """
        )
    )
    cfg = load_config(p)
    assert cfg.owsns == []
    assert cfg.find_connection("Perth-London").city_a == "perth"
    assert cfg.find_connection("perth-london").name == "Perth-London"
    assert "perth" in cfg.city_catalog() and "london" in cfg.city_catalog()


@pytest.mark.parametrize(
    "text, where",
    [
        ("oftns: [{name: F, refractive_index: abc}]", "oftns[0].refractive_index"),
        ("oftns: [{name: F, refractive_index: 0.8}]", "oftns[0]"),
        ("oftns: [{name: F, refractive_index: 1.2}, {name: F, refractive_index: 1.3}]", "oftns[1].name"),
        ("owsns: [{name: W, altitude_km: 550, lisl_range_km: 9000}]", "owsns[0]"),
        ("owsns: [{name: W, altitude_km: 550, gs_range_km: 700}]", "owsns[0]"),
        ("connections: [{name: C, city_a: new_york, city_b: atlantis}]", "connections[0].city_b"),
        ("connections: [{name: C, city_a: london, city_b: london}]", "connections[0]"),
        ("simulation: {duration_s: -1}", "simulation"),
        ("simulation: {duration_s: 5, dt_s: 2}", "simulation.duration_s"),
        ("simulation: {num_planes: 2.5}", "simulation.num_planes"),
        ("simulation: {inclination_deg: 0}", "simulation"),
        ("simulation: {warp: 9}", "simulation"),
        ("output_format: xml", "output_format"),
        ("colour: blue", "top level"),
        ("oftns: {name: F}", "oftns"),
    ],
)
def test_validation_messages_name_the_field(tmp_path, text, where):
    p = tmp_path / "bad.yaml"
    p.write_text(text + "\n")
    with pytest.raises(ConfigError) as err:
        load_config(p)
    assert str(err.value).startswith(str(p))
    assert where in str(err.value)


def test_yaml_syntax_error_reports_line_and_column(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("oftns: [\n  - name\n")
    with pytest.raises(ConfigError, match=r"bad\.yaml:2:3"):
        load_config(p)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="No such file"):
        load_config(tmp_path / "nope.yaml")


def test_config_from_dict_defaults():
    assert config_from_dict(None) == ExperimentConfig()
    with pytest.raises(ConfigError):
        config_from_dict([1, 2])
