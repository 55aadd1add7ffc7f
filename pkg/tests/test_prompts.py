"""
提示词构造
"""
import json
from collections import Counter

import pytest

from outpaintai.exceptions import ConfigError
from outpaintai.geometry import DEFAULT_REGISTRY
from outpaintai.prompts import (
    PromptConfig,
    PromptManager,
    build_background_prompt,
    build_negative,
    build_positive,
    build_prompt,
)
from outpaintai.utils import stream

BUS = DEFAULT_REGISTRY.id_of("BUS")
TRUCK = DEFAULT_REGISTRY.id_of("TRUCK")
SEDAN = DEFAULT_REGISTRY.id_of("SEDAN")


class TestPositive:
    def test_template(self, prompt_cfg):
        spec = build_positive(BUS, stream(0, "prompt"), prompt_cfg, location="downtown", time="sunset")
        assert spec.positive == "A downtown during sunset with no vehicle."
        assert spec.class_id == BUS

    def test_class_subset_respected(self, prompt_cfg):
        for i in range(300):
            assert build_positive(BUS, stream(0, "prompt", i), prompt_cfg).location in {"street", "downtown", "plaza"}
            assert build_positive(TRUCK, stream(0, "prompt", i), prompt_cfg).location in {"highway", "road", "street"}

    def test_uniform_over_subset(self, prompt_cfg):
        counts = Counter(build_positive(SEDAN, stream(1, "prompt", i), prompt_cfg).location for i in range(5000))
        assert set(counts) == set(prompt_cfg.locations)
        for count in counts.values():
            assert abs(count / 5000 - 0.2) < 0.03

    def test_forced_values_do_not_shift_stream(self, prompt_cfg):
        free = build_positive(SEDAN, stream(2, "prompt"), prompt_cfg)
        forced = build_positive(SEDAN, stream(2, "prompt"), prompt_cfg, location=free.location)
        assert forced == free

    def test_forced_location_outside_subset(self, prompt_cfg):
        with pytest.raises(ConfigError):
            build_positive(BUS, stream(0, "prompt"), prompt_cfg, location="highway")

    def test_empty_subset(self):
        cfg = PromptConfig(class_locations={BUS: []})
        with pytest.raises(ConfigError):
            build_positive(BUS, stream(0, "prompt"), cfg)

    def test_deterministic(self, prompt_cfg):
        a = build_prompt(SEDAN, stream(5, "prompt", "s_00", 1), prompt_cfg)
        b = build_prompt(SEDAN, stream(5, "prompt", "s_00", 1), prompt_cfg)
        assert a == b


class TestNegative:
    def test_base_only(self, prompt_cfg):
        assert build_negative(False, prompt_cfg) == "traffic, train, car, truck, bus, van"

    def test_with_extras(self, prompt_cfg):
        negative = build_negative(True, prompt_cfg)
        assert negative.startswith("traffic, train, car, truck, bus, van, ")
        assert negative.endswith("billboard, text, advertisement")

    def test_prompt_carries_negative(self, prompt_cfg):
        spec = build_prompt(SEDAN, stream(0, "prompt"), prompt_cfg, include_extras=False)
        assert spec.negative == "traffic, train, car, truck, bus, van"


class TestBackground:
    def test_draws_description(self, prompt_cfg):
        spec = build_background_prompt(stream(0, "background", "bg_0000"), prompt_cfg)
        assert spec.positive in prompt_cfg.background_descriptions
        assert spec.class_id is None
        assert "car" in spec.negative

    def test_empty_descriptions(self):
        with pytest.raises(ConfigError):
            build_background_prompt(stream(0, "background"), PromptConfig())


class TestPromptManager:
    def test_bundled_file(self, prompt_cfg):
        assert prompt_cfg.locations == ["highway", "road", "street", "downtown", "plaza"]
        assert len(prompt_cfg.times) == 10
        assert prompt_cfg.locations_for(DEFAULT_REGISTRY.id_of("VAN")) == ["highway", "road", "street"]
        assert prompt_cfg.locations_for(SEDAN) == prompt_cfg.locations
        assert prompt_cfg.background_descriptions

    def test_missing_file_uses_defaults(self, tmp_path):
        cfg = PromptManager(str(tmp_path / "absent.json")).get_config()
        assert cfg.template == "A {location} during {time} with no vehicle."
        assert cfg.class_locations == {}

    def test_unknown_class(self, tmp_path):
        path = tmp_path / "prompts.json"
        path.write_text(json.dumps({"outpaint": {"class_locations": {"TRAM": ["street"]}}}))
        with pytest.raises(ConfigError):
            PromptManager(str(path)).get_config()

    def test_subset_outside_vocabulary(self, tmp_path):
        path = tmp_path / "prompts.json"
        path.write_text(json.dumps({"outpaint": {"class_locations": {"BUS": ["airport"]}}}))
        with pytest.raises(ConfigError):
            PromptManager(str(path)).get_config()

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "prompts.json"
        path.write_text("{")
        with pytest.raises(ConfigError):
            PromptManager(str(path)).get_config()
