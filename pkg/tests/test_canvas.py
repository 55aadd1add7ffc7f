"""
放置采样、画布合成、掩码与标注
"""
import numpy as np
import pytest
from scipy import stats

from outpaintai.canvas import (
    CHANNEL_PERMUTATIONS,
    IDENTITY_PERM,
    PlacementSpec,
    compose_canvas,
    derive_annotation,
    mask_sigma,
    permute_channels,
    render_mask,
    sample_placement,
    scale_bounds,
)
from outpaintai.exceptions import PlacementError, ValidationError
from outpaintai.geometry import BufferSpec, PixelBox
from outpaintai.seeds import SeedRecord
from outpaintai.utils import stream

from conftest import CANVAS, gradient_raster, make_seed


def placement_for(seed, canvas_size=512, scale=1.0, top_left=(100, 100), perm=IDENTITY_PERM):
    return PlacementSpec(
        canvas_size=canvas_size,
        scale=scale,
        top_left=top_left,
        channel_perm=perm,
        crop_size=(seed.crop_width, seed.crop_height),
        buffer=seed.buffer,
    )


class TestPermuteChannels:
    def test_all_permutations(self):
        image = np.zeros((2, 2, 3), dtype=np.uint8)
        image[..., 0], image[..., 1], image[..., 2] = 10, 20, 30
        assert len(CHANNEL_PERMUTATIONS) == 6
        for perm in CHANNEL_PERMUTATIONS:
            out = permute_channels(image, perm)
            assert [int(out[0, 0, c]) for c in range(3)] == [(10, 20, 30)[p] for p in perm]

    def test_rejects_bad_input(self):
        with pytest.raises(ValidationError):
            permute_channels(np.zeros((2, 2), dtype=np.uint8), (0, 1, 2))
        with pytest.raises(ValidationError):
            permute_channels(np.zeros((2, 2, 3), dtype=np.uint8), (0, 0, 1))


class TestPlacement:
    def test_scale_bounds(self, seed):
        s_min, s_max = scale_bounds(seed, CANVAS, min_dim=32)
        assert s_min == pytest.approx(0.32)
        assert s_max == pytest.approx(CANVAS / 115)

    def test_same_stream_same_placement(self, seed):
        a = sample_placement(seed, CANVAS, stream(7, "placement", seed.seed_id, 0))
        b = sample_placement(seed, CANVAS, stream(7, "placement", seed.seed_id, 0))
        c = sample_placement(seed, CANVAS, stream(7, "placement", seed.seed_id, 1))
        assert a == b
        assert a != c

    def test_samples_stay_legal(self):
        seed = make_seed(inner=(80, 50))
        s_min, s_max = scale_bounds(seed, CANVAS, 32)
        perms = set()
        for i in range(300):
            placement = sample_placement(seed, CANVAS, stream(1, "placement", i), min_dim=32)
            placement.validate()
            assert s_min <= placement.scale <= s_max
            inner = placement.inner_rect()
            assert min(inner.width, inner.height) >= 32 - 1e-9
            assert placement.buffered_rect().contains(inner, tol=1e-6)
            perms.add(placement.channel_perm)
        assert perms == set(CHANNEL_PERMUTATIONS)

    def test_rounding_keeps_min_dim(self):
        # 左上被图像边界截断的缓冲：100×300 的目标，裁剪 107.5×322.5
        seed = SeedRecord(
            seed_id="edge",
            class_id=1,
            crop_image=gradient_raster(323, 108),
            buffer=BufferSpec(1.15, (0.0, 0.0, 0.075, 0.075)),
            source_path="edge.png",
            crop_box=PixelBox(0.0, 0.0, 107.5, 322.5),
            detected_box=PixelBox(0.0, 0.0, 100.0, 300.0),
        )
        s_min, _ = scale_bounds(seed, 512, min_dim=32)
        assert s_min > 0.32
        placement = sample_placement(seed, 512, stream(0, "placement"), min_dim=32, scale=s_min)
        assert placement.footprint[0] == 35
        assert placement.inner_rect().width >= 32 - 1e-9

    @pytest.mark.parametrize("inner", [(100, 100), (80, 50), (33, 140), (61.3, 47.9)])
    def test_min_scale_meets_min_dim(self, inner):
        seed = make_seed(inner=inner)
        s_min, _ = scale_bounds(seed, 512, min_dim=32)
        placement = sample_placement(seed, 512, stream(0, "placement"), min_dim=32, scale=s_min)
        rect = placement.inner_rect()
        assert min(rect.width, rect.height) >= 32 - 1e-9


class TestPlacementDistribution:
    SAMPLES = 4000

    def test_position_uniform(self, seed):
        # 113 px 的缓冲图在 512 画布上有 400 个合法左上角坐标
        scale = 113 / 115
        xs, ys = [], []
        for i in range(self.SAMPLES):
            placement = sample_placement(seed, 512, stream(11, "placement", i), scale=scale)
            assert placement.footprint == (113, 113)
            xs.append(placement.top_left[0])
            ys.append(placement.top_left[1])
        for values in (xs, ys):
            assert 0 <= min(values) and max(values) <= 399
            counts = np.bincount(np.asarray(values) // 40, minlength=10)
            assert stats.chisquare(counts).pvalue > 1e-4

    def test_scale_and_perm_uniform(self, seed):
        s_min, s_max = scale_bounds(seed, 512, min_dim=32)
        fractions, perms = [], []
        for i in range(self.SAMPLES):
            placement = sample_placement(seed, 512, stream(12, "placement", i))
            fractions.append((placement.scale - s_min) / (s_max - s_min))
            perms.append(CHANNEL_PERMUTATIONS.index(placement.channel_perm))
        buckets = np.minimum((np.asarray(fractions) * 10).astype(int), 9)
        assert stats.chisquare(np.bincount(buckets, minlength=10)).pvalue > 1e-4
        assert stats.chisquare(np.bincount(perms, minlength=6)).pvalue > 1e-4


    def test_unplaceable(self):
        seed = make_seed(inner=(30, 300))
        with pytest.raises(PlacementError) as exc:
            sample_placement(seed, CANVAS, stream(0, "placement"), min_dim=32)
        assert exc.value.reason == "unplaceable"

    def test_forced_scale_out_of_range(self, seed):
        with pytest.raises(PlacementError):
            sample_placement(seed, CANVAS, stream(0, "placement"), scale=5.0)

    def test_forced_scale_does_not_shift_stream(self, seed):
        a = sample_placement(seed, CANVAS, stream(3, "p"))
        b = sample_placement(seed, CANVAS, stream(3, "p"), scale=a.scale)
        assert a == b

    def test_validate_rejects_overflow(self, seed):
        with pytest.raises(ValidationError):
            placement_for(seed, canvas_size=CANVAS, top_left=(50, 0)).validate()

    def test_dict_round_trip(self, seed):
        placement = sample_placement(seed, CANVAS, stream(0, "placement"))
        assert PlacementSpec.from_dict(placement.to_dict()) == placement


class TestAnnotation:
    def test_known_placement(self, seed):
        annotation = derive_annotation(seed, placement_for(seed))
        assert annotation.class_id == seed.class_id
        assert (annotation.cx, annotation.cy, annotation.w, annotation.h) == pytest.approx(
            (0.307617, 0.307617, 0.195313, 0.195313), abs=1e-6
        )

    def test_clamped_buffer(self):
        seed = make_seed(inner=(100, 100))
        clamped = BufferSpec(1.15, (0.0, 0.0, 0.075, 0.075))
        placement = PlacementSpec(512, 1.0, (0, 0), IDENTITY_PERM, (107.5, 107.5), clamped)
        annotation = derive_annotation(seed, placement)
        assert (annotation.cx, annotation.w) == pytest.approx((50 / 512, 100 / 512), abs=1e-3)

    def test_annotations_serialize(self):
        seed = make_seed(inner=(90, 60))
        for i in range(200):
            placement = sample_placement(seed, CANVAS, stream(2, "placement", i))
            assert derive_annotation(seed, placement).validate() == []


class TestMask:
    def test_inner_box_preserved(self, seed):
        placement = placement_for(seed)
        mask = render_mask(placement, 0.5)
        inner = placement.inner_rect()
        assert mask.shape == (512, 512)
        assert mask.dtype == np.uint8
        assert mask[int(inner.y_min) + 1:int(inner.y_max) - 1, int(inner.x_min) + 1:int(inner.x_max) - 1].max() == 0

    def test_far_outside_is_generated(self, seed):
        placement = placement_for(seed)
        mask = render_mask(placement, 0.5)
        sigma = mask_sigma(placement, 0.5)
        reach = int(np.ceil(3 * sigma)) + 1
        assert mask[:100 - reach, :].min() == 255
        assert mask[215 + reach:, :].min() == 255
        assert mask[0, 0] == 255

    def test_sigma_from_thinnest_buffer(self, seed):
        assert mask_sigma(placement_for(seed), 0.5) == pytest.approx(3.75, rel=1e-3)
        assert mask_sigma(placement_for(seed), 0.0) == 0.0

    def test_hard_edge_without_blur(self, seed):
        mask = render_mask(placement_for(seed), 0.0)
        assert set(np.unique(mask)) == {0, 255}
        assert mask[100:215, 100:215].max() == 0
        assert mask[99, 150] == 255

    def test_blur_is_monotone_outward(self, seed):
        mask = render_mask(placement_for(seed), 0.5).astype(int)
        row = mask[157, 157:300]
        assert (np.diff(row) >= 0).all()


class TestComposeCanvas:
    def test_paste_and_fill(self, seed):
        placement = placement_for(seed, perm=(2, 1, 0))
        bundle = compose_canvas(seed, placement, fill_value=128, image_index=3)

        assert bundle.canvas.shape == (512, 512, 3)
        assert bundle.item_key == "s0000_03"
        assert (bundle.canvas[:100] == 128).all()
        assert (bundle.canvas[215:] == 128).all()

        pasted = bundle.canvas[100:215, 100:215]
        np.testing.assert_array_equal(pasted, seed.crop_image[..., [2, 1, 0]])

    def test_mismatched_seed(self, seed):
        other = make_seed(inner=(80, 80))
        with pytest.raises(ValidationError):
            compose_canvas(other, placement_for(seed))

    def test_row_has_placement(self, seed):
        bundle = compose_canvas(seed, placement_for(seed))
        row = bundle.to_row("canvases/a.png", "masks/a.png")
        assert row["item_key"] == "s0000_00"
        assert PlacementSpec.from_dict(row["placement"]) == bundle.placement
        assert row["annotation"] == pytest.approx([0.307617, 0.307617, 0.195313, 0.195313], abs=1e-6)
