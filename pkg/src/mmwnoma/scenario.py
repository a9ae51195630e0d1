"""One bundle of all the knobs a transmission experiment needs."""

from dataclasses import dataclass, replace

from .channel import ArrayConfig, LinkBudget
from .geometry import DeploymentModel, Thresholds, UserRegion, membership_probabilities
from .strategy import PowerSplit, TargetRates


@dataclass(frozen=True)
class Scenario:
    region: UserRegion
    model: DeploymentModel
    thresholds: Thresholds
    array: ArrayConfig
    budget: LinkBudget
    split: PowerSplit
    targets: TargetRates

    @property
    def mu(self):
        return self.model.expected_count(self.region)

    @property
    def membership(self):
        """(p_theta, p_d) for a uniformly deployed user."""
        return membership_probabilities(self.region, self.thresholds)

    def with_snr_db(self, snr_db):
        budget = LinkBudget(
            snr_linear=10.0 ** (snr_db / 10.0),
            path_loss_exponent=self.budget.path_loss_exponent,
            fading_variance=self.budget.fading_variance,
        )
        return replace(self, budget=budget)
