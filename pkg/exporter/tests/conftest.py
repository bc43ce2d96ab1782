import pytest

from iat_exporter import create_model, export_model


@pytest.fixture(scope="session")
def b0_export():
    return export_model(create_model("efficientnet_b0"), "efficientnet_b0")


@pytest.fixture(scope="session")
def b2_export():
    return export_model(create_model("efficientnet_b2"), "efficientnet_b2")


@pytest.fixture(scope="session")
def rexnet_export():
    return export_model(create_model("rexnet_100"), "rexnet_100")
