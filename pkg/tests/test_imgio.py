import numpy as np
import pytest
from PIL import Image

from aitvseg.imgio import quantize, read_image, read_labels, write_image, write_labels
from aitvseg.pipeline import MultiChannelImage


class TestImageRoundTrip:
    def test_grayscale_png(self, tmp_path, rng):
        image = MultiChannelImage.grayscale(rng.random((12, 15)))
        path = tmp_path / "gray.png"
        write_image(image, path)
        back = read_image(path)
        assert back.n_channels == 1
        # quantized values survive exactly
        assert np.array_equal(quantize(back.channels), quantize(image.channels))
        assert np.array_equal(back.channels, quantize(image.channels) / 255.0)

    def test_rgb_png(self, tmp_path, rng):
        image = MultiChannelImage.rgb(rng.random((3, 9, 7)))
        path = tmp_path / "color.png"
        write_image(image, path)
        back = read_image(path)
        assert back.roles == ("red", "green", "blue")
        assert np.array_equal(quantize(back.channels), quantize(image.channels))

    def test_pgm_and_ppm(self, tmp_path, rng):
        gray = MultiChannelImage.grayscale(rng.random((8, 8)))
        write_image(gray, tmp_path / "img.pgm")
        assert read_image(tmp_path / "img.pgm").n_channels == 1
        color = MultiChannelImage.rgb(rng.random((3, 8, 8)))
        write_image(color, tmp_path / "img.ppm")
        assert read_image(tmp_path / "img.ppm").n_channels == 3

    def test_sixteen_bit_grayscale(self, tmp_path):
        data = (np.arange(64, dtype=np.uint16).reshape(8, 8) * 1000)
        Image.fromarray(data).save(tmp_path / "deep.png")
        back = read_image(tmp_path / "deep.png")
        assert back.channels.max() <= 1.0
        assert np.array_equal(back.channels[0], data / 65535.0)

    def test_unsupported_mode_rejected(self, tmp_path):
        Image.new("RGBA", (4, 4)).save(tmp_path / "rgba.png")
        with pytest.raises(ValueError, match="mode"):
            read_image(tmp_path / "rgba.png")

    def test_quantization_rule(self):
        values = np.array([[0.0, 1.0, 0.5, -0.2, 1.7]])
        assert quantize(values).tolist() == [[0, 255, 128, 0, 255]]


class TestLabelRoundTrip:
    def test_indexed_round_trip(self, tmp_path, rng):
        labels = rng.integers(1, 5, size=(10, 10))
        labels[:4, 0] = [1, 2, 3, 4]
        path = tmp_path / "labels.png"
        write_labels(labels, path)
        assert np.array_equal(read_labels(path), labels)

    def test_label_range_enforced(self, tmp_path):
        with pytest.raises(ValueError, match="1..256"):
            write_labels(np.zeros((4, 4), dtype=int), tmp_path / "bad.png")

    def test_grayscale_map_densified(self, tmp_path):
        data = np.array([[0, 0, 128], [128, 255, 255]], dtype=np.uint8)
        Image.fromarray(data, mode="L").save(tmp_path / "gt.png")
        labels = read_labels(tmp_path / "gt.png")
        assert np.array_equal(labels, [[1, 1, 2], [2, 3, 3]])

    def test_written_png_has_one_color_per_label(self, tmp_path):
        labels = np.array([[1, 1], [2, 2]])
        path = tmp_path / "two.png"
        write_labels(labels, path)
        with Image.open(path) as im:
            assert im.mode == "P"
            assert len(np.unique(np.asarray(im))) == 2
