import numpy as np
import pytest
import torch
from PIL import Image


class TinyEmbedder(torch.nn.Module):
    """Stand-in for a pretrained face embedder: conv features to a 32-d vector."""

    def __init__(self, dim: int = 32):
        super().__init__()
        self.conv = torch.nn.Conv2d(3, 8, kernel_size=3, stride=2)
        self.fc = torch.nn.Linear(8 * 4 * 4, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = torch.relu(self.conv(x))
        h = torch.nn.functional.adaptive_avg_pool2d(h, 4)
        return self.fc(h.flatten(1))


@pytest.fixture(scope="session")
def model_path(tmp_path_factory):
    torch.manual_seed(0)
    model = TinyEmbedder().eval()
    scripted = torch.jit.trace(model, torch.zeros(1, 3, 112, 112))
    path = tmp_path_factory.mktemp("model") / "tiny.pt"
    scripted.save(str(path))
    return path


@pytest.fixture()
def image_dir(tmp_path):
    rng = np.random.default_rng(1)
    directory = tmp_path / "faces"
    directory.mkdir()
    for name in ("alice", "bob", "carol"):
        arr = rng.integers(0, 256, size=(96, 96, 3)).astype(np.uint8)
        Image.fromarray(arr).save(directory / f"{name}.png")
    return directory
