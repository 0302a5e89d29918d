"""Shared fixture corpora, generated once per session."""

from __future__ import annotations

import pytest

from vprjpeg.dataset import load_manifest
from vprjpeg.fixtures import generate_flat_corpus, generate_photo_corpus, generate_shifted_corpus


@pytest.fixture(scope="session")
def photo_manifest_path(tmp_path_factory):
    """20 textured self-match scenes, 320x240."""
    root = tmp_path_factory.mktemp("photo_corpus")
    return generate_photo_corpus(root, count=20, seed=7, size=(320, 240))


@pytest.fixture(scope="session")
def photo_manifest(photo_manifest_path):
    return load_manifest(photo_manifest_path)


@pytest.fixture(scope="session")
def flat_manifest_path(tmp_path_factory):
    """10 constant-color self-match frames."""
    root = tmp_path_factory.mktemp("flat_corpus")
    return generate_flat_corpus(root, count=10, seed=11, size=(320, 240))


@pytest.fixture(scope="session")
def flat_manifest(flat_manifest_path):
    return load_manifest(flat_manifest_path)


@pytest.fixture(scope="session")
def shifted_manifest_path(tmp_path_factory):
    """100 query/reference pairs differing by a 4-px crop offset."""
    root = tmp_path_factory.mktemp("shifted_corpus")
    return generate_shifted_corpus(root, count=100, seed=13, size=(320, 240), shift=4)


@pytest.fixture(scope="session")
def shifted_manifest(shifted_manifest_path):
    return load_manifest(shifted_manifest_path)
