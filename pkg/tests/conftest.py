import pytest

from grindmon import fit_bundle, generate_campaign, load_manifest, table2_preset


@pytest.fixture(scope="session")
def campaign_dir(tmp_path_factory):
    """One frozen synthetic campaign (seed 42) shared across the suite."""
    out = tmp_path_factory.mktemp("campaign")
    generate_campaign(table2_preset(seed=42), out)
    return out


@pytest.fixture(scope="session")
def wheel1_manifest(campaign_dir):
    return load_manifest(campaign_dir / "wheel1-manifest.csv")


@pytest.fixture(scope="session")
def wheel2_manifest(campaign_dir):
    return load_manifest(campaign_dir / "wheel2-manifest.csv")


@pytest.fixture(scope="session")
def wheel3_manifest(campaign_dir):
    return load_manifest(campaign_dir / "wheel3-manifest.csv")


@pytest.fixture(scope="session")
def wheel1_fit(wheel1_manifest):
    return fit_bundle(wheel1_manifest)


@pytest.fixture(scope="session")
def wheel1_bundle(wheel1_fit):
    return wheel1_fit[0]
