import pytest

from upstream_fixtures import build_hgcn_csv, build_planetoid, build_text


@pytest.fixture
def planetoid_dir(tmp_path):
    build_planetoid(tmp_path)
    return tmp_path


@pytest.fixture
def hgcn_dir(tmp_path):
    build_hgcn_csv(tmp_path)
    return tmp_path


@pytest.fixture
def text_dir(tmp_path):
    build_text(tmp_path)
    return tmp_path
