import uuid
from typing import List, Optional

from experiments.models import ExperimentRun


class ExperimentRepository:
    """
    Repository class for ExperimentRun persistence.
    Keeps the ORM out of the services and management commands.
    """

    def create(self, kind: str, spec: dict, parameters: dict, seed: Optional[int], result: dict) -> ExperimentRun:
        return ExperimentRun.objects.create(
            kind=kind, spec=spec, parameters=parameters, seed=seed, result=result,
        )

    def get_by_run_id(self, run_id: str) -> Optional[ExperimentRun]:
        """
        Retrieve a run by its public UUID.

        Returns:
            Optional[ExperimentRun]: the run, or None for unknown or malformed ids
        """
        try:
            uuid.UUID(str(run_id))
            return ExperimentRun.objects.get(run_id=run_id)
        except (ValueError, ExperimentRun.DoesNotExist):
            return None

    def get_all(self) -> List[ExperimentRun]:
        return ExperimentRun.objects.all()

    def filter_by_kind(self, kind: str) -> List[ExperimentRun]:
        return ExperimentRun.objects.filter(kind=kind)
