import numpy as np
import pytest

from mmwnoma import (
    ArrayConfig,
    DeploymentModel,
    LinkBudget,
    PowerSplit,
    Scenario,
    TargetRates,
    UserRegion,
    thresholds_from_coefficients,
)

DEG = np.pi / 180.0


@pytest.fixture(scope="session")
def region():
    return UserRegion(d_min=0.0, d_max=45.0, delta=15.0 * DEG, theta_bar=0.0)


@pytest.fixture(scope="session")
def thresholds(region):
    return thresholds_from_coefficients(region, c_d=0.2, c_theta=0.1)


@pytest.fixture(scope="session")
def array64():
    return ArrayConfig(num_elements=64)


@pytest.fixture(scope="session")
def split():
    return PowerSplit.from_strong_fraction(0.4)


@pytest.fixture(scope="session")
def targets():
    return TargetRates(r_strong=8.0, r_weak=1.0, r_sut=8.0)


def make_scenario(snr_db=50.0, d_max=45.0, delta_deg=15.0, c_theta=0.1, c_d=0.2,
                  density=0.01, beta_sq_strong=0.4, r_strong=8.0, r_weak=1.0,
                  r_sut=8.0, num_elements=64):
    region = UserRegion(d_min=0.0, d_max=d_max, delta=delta_deg * DEG, theta_bar=0.0)
    return Scenario(
        region=region,
        model=DeploymentModel(density=density),
        thresholds=thresholds_from_coefficients(region, c_d=c_d, c_theta=c_theta),
        array=ArrayConfig(num_elements=num_elements),
        budget=LinkBudget.from_snr_db(snr_db),
        split=PowerSplit.from_strong_fraction(beta_sq_strong),
        targets=TargetRates(r_strong=r_strong, r_weak=r_weak, r_sut=r_sut),
    )


@pytest.fixture(scope="session")
def scenario_50db():
    return make_scenario(50.0)
