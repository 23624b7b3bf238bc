import uuid

from django.db import models


class RunKinds:
    ESTIMATE = 'estimate'
    SWEEP = 'sweep'
    THRESHOLD = 'threshold'
    EXACT = 'exact'
    ODE = 'ode'
    COUPLE_CHECK = 'couple_check'
    NICE_CHAIN = 'nice_chain'
    SIMULATE = 'simulate'
    ACCEPTANCE = 'acceptance'

    CHOICES = [
        (ESTIMATE, 'Monte Carlo rho estimate'),
        (SWEEP, 'Threshold sweep'),
        (THRESHOLD, 'Threshold bisection'),
        (EXACT, 'Exact rho grid'),
        (ODE, 'Deterministic ODE trajectory'),
        (COUPLE_CHECK, 'Coupling check'),
        (NICE_CHAIN, 'Nice chain statistics'),
        (SIMULATE, 'Single trajectory'),
        (ACCEPTANCE, 'Acceptance suite'),
    ]


class ExperimentRun(models.Model):
    """
    A stored experiment: the spec and parameters it ran with and its result.
    """
    run_id = models.UUIDField(default=uuid.uuid4, unique=True, editable=False)
    kind = models.CharField(max_length=20, choices=RunKinds.CHOICES)
    spec = models.JSONField(default=dict, blank=True, help_text="Flat key-value model spec")
    parameters = models.JSONField(default=dict, blank=True, help_text="Run parameters other than the spec")
    seed = models.DecimalField(
        max_digits=20, decimal_places=0, null=True, blank=True,
        help_text="Base seed (unsigned 64-bit)"
    )
    result = models.JSONField(default=dict, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        db_table = 'experiment_run'
        verbose_name = "Experiment Run"
        verbose_name_plural = "Experiment Runs"
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['kind', 'created_at']),
        ]

    def __str__(self):
        return f"{self.kind} {self.run_id}"
