"""
框几何与标签格式
"""
import numpy as np
import pytest

from outpaintai.exceptions import GeometryError, LabelParseError, ValidationError
from outpaintai.geometry import (
    BufferSpec,
    ClassRegistry,
    DEFAULT_REGISTRY,
    NormAnnotation,
    PixelBox,
    buffered_crop,
    iou,
    parse_labels,
    parse_predictions,
    remove_buffer,
    serialize_labels,
)


def raster_iou(a, b, size: int = 64) -> float:
    """整数框的像素计数 IoU"""
    ga = np.zeros((size, size), dtype=bool)
    gb = np.zeros((size, size), dtype=bool)
    ga[int(a.y_min):int(a.y_max), int(a.x_min):int(a.x_max)] = True
    gb[int(b.y_min):int(b.y_max), int(b.x_min):int(b.x_max)] = True
    return (ga & gb).sum() / (ga | gb).sum()


def random_box(rng) -> PixelBox:
    x, y = (int(v) for v in rng.integers(0, 32, 2))
    w, h = (int(v) for v in rng.integers(1, 32, 2))
    return PixelBox(x, y, x + w, y + h)


class TestPixelBox:
    def test_rejects_degenerate(self):
        with pytest.raises(GeometryError):
            PixelBox(10, 10, 10, 20)
        with pytest.raises(GeometryError):
            PixelBox(-1, 0, 5, 5)
        with pytest.raises(GeometryError):
            PixelBox(0, 0, float("nan"), 5)

    def test_properties(self):
        box = PixelBox(10, 20, 30, 60)
        assert box.width == 20
        assert box.height == 40
        assert box.area == 800
        assert box.center == (20, 40)
        assert PixelBox(0, 0, 100, 100).contains(box)


class TestIou:
    def test_identity(self):
        box = PixelBox(0, 0, 10, 10)
        assert iou(box, box) == 1.0

    def test_disjoint(self):
        assert iou(PixelBox(0, 0, 10, 10), PixelBox(20, 20, 30, 30)) == 0.0

    def test_partial_overlap(self):
        assert iou(PixelBox(10, 10, 20, 20), PixelBox(15, 15, 25, 25)) == pytest.approx(25 / 175)

    def test_touching_edges_is_zero(self):
        assert iou(PixelBox(0, 0, 10, 10), PixelBox(10, 0, 20, 10)) == 0.0

    def test_matches_raster_count(self):
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            a, b = random_box(rng), random_box(rng)
            value = iou(a, b)
            assert value == iou(b, a)
            assert 0.0 <= value <= 1.0
            assert abs(value - raster_iou(a, b)) <= 2 / min(a.area, b.area)


class TestBufferedCrop:
    def test_symmetric(self):
        crop, spec = buffered_crop(PixelBox(100, 100, 300, 300), 1000, 1000, 1.15)
        assert crop.as_tuple() == pytest.approx((85, 85, 315, 315))
        assert spec.per_side_fractions == pytest.approx((0.075, 0.075, 0.075, 0.075))

    def test_clamped_at_border(self):
        crop, spec = buffered_crop(PixelBox(0, 0, 200, 200), 1000, 1000, 1.15)
        assert crop.as_tuple() == pytest.approx((0, 0, 215, 215))
        assert spec.left == 0 and spec.top == 0
        assert spec.right == pytest.approx(0.075)
        assert spec.bottom == pytest.approx(0.075)

    def test_wider_factor(self):
        crop, _ = buffered_crop(PixelBox(400, 400, 600, 600), 1000, 1000, 1.30)
        assert crop.as_tuple() == pytest.approx((370, 370, 630, 630))

    def test_detected_outside_image(self):
        with pytest.raises(GeometryError):
            buffered_crop(PixelBox(900, 900, 1100, 1000), 1000, 1000)

    def test_factor_must_exceed_one(self):
        with pytest.raises(GeometryError):
            buffered_crop(PixelBox(0, 0, 10, 10), 100, 100, 1.0)


class TestRemoveBuffer:
    def test_symmetric(self):
        inner = remove_buffer(230, 230, BufferSpec.symmetric(1.15))
        assert (inner.width, inner.height) == pytest.approx((200, 200))
        assert (inner.x_min, inner.y_min) == pytest.approx((15, 15))

    def test_rectangular(self):
        inner = remove_buffer(115, 230, BufferSpec.symmetric(1.15))
        assert (inner.width, inner.height) == pytest.approx((100, 200))

    def test_clamped(self):
        spec = BufferSpec(1.15, (0.0, 0.0, 0.075, 0.075))
        inner = remove_buffer(215, 215, spec)
        assert inner.as_tuple() == pytest.approx((0, 0, 200, 200))

    def test_negative_fractions_rejected(self):
        with pytest.raises(GeometryError):
            BufferSpec(1.15, (-2.0, 0.0, 0.0, 0.0))

    def test_round_trip_recovers_detection(self):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            width, height = rng.integers(64, 800, 2)
            w = rng.uniform(1, width - 1)
            h = rng.uniform(1, height - 1)
            x0 = rng.uniform(0, width - w)
            y0 = rng.uniform(0, height - h)
            detected = PixelBox(x0, y0, x0 + w, y0 + h)
            factor = rng.choice([1.15, 1.3, 1.5])

            crop, spec = buffered_crop(detected, width, height, factor)
            inner = remove_buffer(crop.width, crop.height, spec)
            recovered = (inner.x_min + crop.x_min, inner.y_min + crop.y_min,
                         inner.x_max + crop.x_min, inner.y_max + crop.y_min)
            assert recovered == pytest.approx(detected.as_tuple(), abs=0.5)


class TestLabels:
    def test_serialize_format(self):
        text = serialize_labels([NormAnnotation(5, 0.5, 0.5, 0.25, 0.25)])
        assert text == "5 0.500000 0.500000 0.250000 0.250000\n"

    def test_empty_is_background(self):
        assert serialize_labels([]) == ""
        assert parse_labels("") == []

    def test_round_trip(self):
        rng = np.random.default_rng(2)
        annotations = []
        for _ in range(100):
            w, h = rng.uniform(0.01, 1.0, 2)
            cx = rng.uniform(w / 2, 1 - w / 2)
            cy = rng.uniform(h / 2, 1 - h / 2)
            annotations.append(NormAnnotation(int(rng.integers(0, 9)), cx, cy, w, h))

        parsed = parse_labels(serialize_labels(annotations))
        assert len(parsed) == len(annotations)
        for a, b in zip(annotations, parsed):
            assert a.class_id == b.class_id
            assert (b.cx, b.cy, b.w, b.h) == pytest.approx((a.cx, a.cy, a.w, a.h), abs=1e-6)

    @pytest.mark.parametrize("text, line_no", [
        ("1 0.5 0.5 0.2\n", 1),
        ("1 0.5 0.5 0.2 0.2\n9 0.5 0.5 0.2 0.2\n", 2),
        ("1 0.5 0.5 1.2 0.2\n", 1),
        ("x 0.5 0.5 0.2 0.2\n", 1),
    ])
    def test_parse_errors_carry_line(self, text, line_no):
        with pytest.raises(LabelParseError) as exc:
            parse_labels(text)
        assert exc.value.line_no == line_no

    def test_serialize_rejects_out_of_canvas(self):
        with pytest.raises(ValidationError):
            serialize_labels([NormAnnotation(0, 0.95, 0.5, 0.2, 0.2)])

    def test_predictions_have_confidence(self):
        parsed = parse_predictions("2 0.5 0.5 0.2 0.2 0.875000\n")
        annotation, confidence = parsed[0]
        assert annotation.class_id == 2
        assert confidence == pytest.approx(0.875)

    def test_pixel_round_trip(self):
        annotation = NormAnnotation(3, 0.4, 0.6, 0.2, 0.3)
        box = annotation.to_pixel_box(512, 512)
        back = NormAnnotation.from_pixel_box(3, box, 512, 512)
        assert (back.cx, back.cy, back.w, back.h) == pytest.approx((0.4, 0.6, 0.2, 0.3), abs=1e-6)


class TestRegistry:
    def test_default_order(self):
        assert DEFAULT_REGISTRY.names == [
            "COUPE", "SEDAN", "SUV", "MINIVAN", "MINIBUS", "BUS", "VAN", "PICKUP", "TRUCK",
        ]
        assert len(DEFAULT_REGISTRY) == 9

    def test_lookup(self):
        assert DEFAULT_REGISTRY.id_of("bus") == 5
        assert DEFAULT_REGISTRY.name_of(8) == "TRUCK"
        assert 9 not in DEFAULT_REGISTRY
        with pytest.raises(KeyError):
            DEFAULT_REGISTRY.id_of("tram")

    def test_ids_must_be_contiguous(self):
        with pytest.raises(ValueError):
            ClassRegistry([(0, "A", ""), (2, "B", "")])
        with pytest.raises(ValueError):
            ClassRegistry([(0, "A", ""), (1, "A", "")])
