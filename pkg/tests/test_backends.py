"""
生成后端：mock 行为、远程协议、工厂
"""
import base64

import numpy as np
import pytest
from aiohttp import web

from outpaintai.backends import BackendFactory, MockBackend
from outpaintai.backends.remote_backend import RemoteBackend
from outpaintai.exceptions import BackendError, ConfigError
from outpaintai.pipeline_config import BackendConfig
from outpaintai.quality import tv_loss
from outpaintai.utils import decode_image, encode_png, image_digest

from conftest import CANVAS, gradient_raster


@pytest.fixture
def canvas_and_mask():
    canvas = np.full((CANVAS, CANVAS, 3), 128, dtype=np.uint8)
    canvas[40:80, 40:80] = gradient_raster(40, 40)
    mask = np.full((CANVAS, CANVAS), 255, dtype=np.uint8)
    mask[40:80, 40:80] = 0
    return canvas, mask


class TestMockBackend:
    async def test_preserves_kept_region(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = MockBackend(mode="always-smooth")
        out = await backend.outpaint(canvas, mask, "p", "n", noise_seed=1, request_key="a")
        assert out.shape == canvas.shape
        np.testing.assert_array_equal(out[mask == 0], canvas[mask == 0])
        assert backend.tags[image_digest(out)] == "smooth"

    async def test_styles_have_distinct_tv(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        smooth = await MockBackend(mode="always-smooth").outpaint(canvas, mask, "p", "n", 3)
        noisy = await MockBackend(mode="always-noisy").outpaint(canvas, mask, "p", "n", 3)
        assert tv_loss(smooth) < 15
        assert tv_loss(noisy) > 15

    async def test_noisy_first_k_counts_per_key(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = MockBackend(mode="noisy-first-k", noisy_k=2)
        styles = []
        for attempt in range(4):
            out = await backend.outpaint(canvas, mask, "p", "n", attempt, request_key="a")
            styles.append(backend.tags[image_digest(out)])
        assert styles == ["noisy", "noisy", "smooth", "smooth"]

        other = await backend.outpaint(canvas, mask, "p", "n", 0, request_key="b")
        assert backend.tags[image_digest(other)] == "noisy"
        assert backend.calls == {"outpaint:a": 4, "outpaint:b": 1}

    async def test_tag_registry_is_bounded(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = MockBackend(mode="always-smooth", tag_capacity=3)
        outputs = [await backend.outpaint(canvas, mask, "p", "n", seed, request_key=f"k{seed}") for seed in range(5)]
        assert len(backend.tags) == 3
        assert image_digest(outputs[0]) not in backend.tags
        assert list(backend.tags) == [image_digest(out) for out in outputs[2:]]

    async def test_close_clears_shared_registry(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = MockBackend()
        shared = backend.tags
        await backend.outpaint(canvas, mask, "p", "n", 1, request_key="a")
        assert shared
        await backend.close()
        assert shared is backend.tags
        assert not shared and not backend.calls

    async def test_same_seed_same_output(self, canvas_and_mask):
        canvas, mask = canvas_and_mask
        a = await MockBackend().outpaint(canvas, mask, "p", "n", 11)
        b = await MockBackend().outpaint(canvas, mask, "p", "n", 11)
        c = await MockBackend().outpaint(canvas, mask, "p", "n", 12)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    async def test_text_to_image_size(self):
        out = await MockBackend().text_to_image("p", "n", 5, size=(96, 64))
        assert out.shape == (64, 96, 3)

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            MockBackend(mode="sometimes")


@pytest.fixture
async def inference_server():
    """最小推理服务：记录请求，前 fail_first 次返回 500"""
    state = {"requests": [], "fail_first": 0}

    async def outpaint(request):
        payload = await request.json()
        state["requests"].append(payload)
        if len(state["requests"]) <= state["fail_first"]:
            return web.Response(status=500, text="busy")
        width, height = payload["size"]
        image = np.full((height, width, 3), 90, dtype=np.uint8)
        return web.json_response({"image": base64.b64encode(encode_png(image)).decode("ascii")})

    async def text2image(request):
        payload = await request.json()
        state["requests"].append(payload)
        width, height = payload["size"]
        return web.Response(body=encode_png(np.zeros((height, width, 3), dtype=np.uint8)), content_type="image/png")

    app = web.Application()
    app.router.add_post("/outpaint", outpaint)
    app.router.add_post("/text2image", text2image)
    runner = web.AppRunner(app)
    await runner.setup()
    site = web.TCPSite(runner, "127.0.0.1", 0)
    await site.start()
    host, port = runner.addresses[0][:2]
    state["endpoint"] = f"http://{host}:{port}"
    yield state
    await runner.cleanup()


class TestRemoteBackend:
    async def test_outpaint_round_trip(self, inference_server, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = RemoteBackend(endpoint=inference_server["endpoint"], retries=0)
        try:
            out = await backend.outpaint(canvas, mask, "A road", "car", noise_seed=42)
        finally:
            await backend.close()

        assert out.shape == canvas.shape
        payload = inference_server["requests"][0]
        assert payload["noise_seed"] == 42
        assert payload["positive"] == "A road"
        sent_mask = decode_image(base64.b64decode(payload["mask"]))[..., 0]
        np.testing.assert_array_equal(sent_mask, mask)

    async def test_mask_inversion_on_the_wire(self, inference_server, canvas_and_mask):
        canvas, mask = canvas_and_mask
        backend = RemoteBackend(endpoint=inference_server["endpoint"], retries=0, mask_inverted=True)
        try:
            await backend.outpaint(canvas, mask, "p", "n", noise_seed=1)
        finally:
            await backend.close()
        sent_mask = decode_image(base64.b64decode(inference_server["requests"][0]["mask"]))[..., 0]
        np.testing.assert_array_equal(sent_mask, 255 - mask)

    async def test_retries_then_succeeds(self, inference_server, canvas_and_mask):
        canvas, mask = canvas_and_mask
        inference_server["fail_first"] = 1
        backend = RemoteBackend(endpoint=inference_server["endpoint"], retries=2)
        try:
            await backend.outpaint(canvas, mask, "p", "n", noise_seed=1)
        finally:
            await backend.close()
        assert len(inference_server["requests"]) == 2

    async def test_gives_up_after_retries(self, inference_server, canvas_and_mask):
        canvas, mask = canvas_and_mask
        inference_server["fail_first"] = 10
        backend = RemoteBackend(endpoint=inference_server["endpoint"], retries=0)
        try:
            with pytest.raises(BackendError):
                await backend.outpaint(canvas, mask, "p", "n", noise_seed=1)
        finally:
            await backend.close()

    async def test_text_to_image_raw_bytes(self, inference_server):
        backend = RemoteBackend(endpoint=inference_server["endpoint"], retries=0)
        try:
            out = await backend.text_to_image("p", "n", 3, size=(80, 48))
        finally:
            await backend.close()
        assert out.shape == (48, 80, 3)


class TestBackendFactory:
    def test_mock_from_config(self):
        backend = BackendFactory.create_from_config(BackendConfig(name="mock", mock_mode="noisy-first-k", mock_noisy_k=4))
        assert isinstance(backend, MockBackend)
        assert backend.noisy_k == 4

    def test_unknown(self):
        with pytest.raises(ConfigError):
            BackendFactory.create("dall-e-9")

    def test_list(self):
        assert set(BackendFactory.list_backends()) == {"mock", "diffusers", "remote", "openai"}
