import pytest

from thermorl import (
    Adjacency,
    BuildingLayout,
    ConfigurationError,
    IngestionError,
    ZoneSpec,
    layout_from_dict,
    load_layout,
    save_layout,
)


def two_zone_layout():
    return BuildingLayout(
        name="pair",
        zones=(
            ZoneSpec("a", floor_area_m2=20.0, height_m=2.5,
                     exterior_wall_area_m2=30.0, ground_floor_area_m2=20.0),
            ZoneSpec("b", floor_area_m2=20.0, height_m=2.5,
                     exterior_wall_area_m2=30.0, roof_area_m2=20.0),
        ),
        adjacencies=(Adjacency("a", "b", area_m2=20.0, element="slab"),),
    )


class TestValidation:
    def test_valid_layout_builds(self):
        layout = two_zone_layout()
        assert layout.num_zones == 2
        assert layout.zone_index("b") == 1

    def test_unknown_zone_index(self):
        with pytest.raises(ConfigurationError, match="unknown zone"):
            two_zone_layout().zone_index("c")

    def test_no_zones(self):
        with pytest.raises(ConfigurationError, match="no zones"):
            BuildingLayout(name="empty", zones=())

    def test_duplicate_zone_names(self):
        with pytest.raises(ConfigurationError, match="duplicate zone"):
            BuildingLayout(
                name="dup",
                zones=(ZoneSpec("a", 20.0, 2.5), ZoneSpec("a", 10.0, 2.5)),
            )

    def test_non_positive_floor_area(self):
        with pytest.raises(ConfigurationError, match="floor area"):
            BuildingLayout(name="bad", zones=(ZoneSpec("a", 0.0, 2.5),))

    def test_negative_window_area(self):
        with pytest.raises(ConfigurationError, match="window_area_m2"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5, window_area_m2=-1.0),),
            )

    def test_adjacency_unknown_zone(self):
        with pytest.raises(ConfigurationError, match="unknown zone"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5),),
                adjacencies=(Adjacency("a", "ghost", 10.0),),
            )

    def test_self_adjacency(self):
        with pytest.raises(ConfigurationError, match="adjoin itself"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5),),
                adjacencies=(Adjacency("a", "a", 10.0),),
            )

    def test_duplicate_adjacency_either_order(self):
        with pytest.raises(ConfigurationError, match="duplicate adjacency"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5), ZoneSpec("b", 20.0, 2.5)),
                adjacencies=(
                    Adjacency("a", "b", 10.0),
                    Adjacency("b", "a", 5.0),
                ),
            )

    def test_zero_shared_area(self):
        with pytest.raises(ConfigurationError, match="shared area"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5), ZoneSpec("b", 20.0, 2.5)),
                adjacencies=(Adjacency("a", "b", 0.0),),
            )

    def test_unknown_element_kind(self):
        with pytest.raises(ConfigurationError, match="element"):
            BuildingLayout(
                name="bad",
                zones=(ZoneSpec("a", 20.0, 2.5), ZoneSpec("b", 20.0, 2.5)),
                adjacencies=(Adjacency("a", "b", 10.0, element="door"),),
            )


class TestSerialization:
    def test_round_trip_through_dict(self):
        layout = two_zone_layout()
        assert layout_from_dict(layout.to_dict()) == layout

    def test_round_trip_through_file(self, tmp_path):
        layout = two_zone_layout()
        path = tmp_path / "pair.json"
        save_layout(layout, path)
        assert load_layout(path) == layout

    def test_defaults_filled_in(self):
        layout = layout_from_dict(
            {"name": "min", "zones": [{"name": "a", "floor_area_m2": 10.0,
                                       "height_m": 2.5}]}
        )
        zone = layout.zones[0]
        assert zone.window_area_m2 == 0.0
        assert zone.max_power_w == 5000.0

    def test_adjacency_element_defaults_to_intwall(self):
        layout = layout_from_dict(
            {
                "name": "min",
                "zones": [
                    {"name": "a", "floor_area_m2": 10.0, "height_m": 2.5},
                    {"name": "b", "floor_area_m2": 10.0, "height_m": 2.5},
                ],
                "adjacencies": [{"zones": ["a", "b"], "area_m2": 8.0}],
            }
        )
        assert layout.adjacencies[0].element == "intwall"

    def test_malformed_dict(self):
        with pytest.raises(IngestionError, match="malformed"):
            layout_from_dict({"zones": [{"name": "a"}]})

    def test_missing_file(self, tmp_path):
        with pytest.raises(IngestionError, match="not found"):
            load_layout(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(IngestionError, match="JSON"):
            load_layout(path)


class TestShippedLayouts:
    def test_toy2(self, library):
        layout = library.layout("toy2")
        assert layout.num_zones == 2
        assert {a.element for a in layout.adjacencies} == {"slab"}

    def test_office5(self, library):
        layout = library.layout("office5")
        assert layout.num_zones == 5
        core = layout.zones[layout.zone_index("core")]
        assert core.exterior_wall_area_m2 == 0.0
        assert core.window_area_m2 == 0.0
