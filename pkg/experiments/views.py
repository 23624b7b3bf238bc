from chains.domain import Config

from rest_framework import mixins, status, viewsets
from rest_framework.authentication import SessionAuthentication
from rest_framework.decorators import api_view, authentication_classes, permission_classes
from rest_framework.permissions import IsAuthenticated
from rest_framework.response import Response
from rest_framework_simplejwt.authentication import JWTAuthentication

from drf_spectacular.types import OpenApiTypes
from drf_spectacular.utils import OpenApiParameter, extend_schema

from experiments.models import RunKinds
from experiments.repository.repository import ExperimentRepository
from experiments.services.experiment_service import (
    EstimationService, ExactService, OdeService, RunRecorder, SimulationService
)

from .serializers import (
    EstimateRequestSerializer,
    ExactRequestSerializer,
    ExperimentRunSerializer,
    OdeRequestSerializer,
    SimulateRequestSerializer,
)

# Dependency injection
run_repo = ExperimentRepository()
recorder = RunRecorder(run_repo)
estimation_service = EstimationService(recorder)
exact_service = ExactService(recorder)
ode_service = OdeService(recorder)
simulation_service = SimulationService(recorder)


def _config(data) -> Config:
    return Config(data['x0'], data['x1'])


def _respond(payload, error):
    if error:
        return Response({"error": error}, status=status.HTTP_400_BAD_REQUEST)
    return Response(payload, status=status.HTTP_200_OK)


@extend_schema(
    request=EstimateRequestSerializer,
    responses={200: {'description': 'Monte Carlo estimate of rho with its Wilson interval.'}},
    tags=['Experiments']
)
@api_view(['POST'])
@authentication_classes([JWTAuthentication, SessionAuthentication])
@permission_classes([IsAuthenticated])
def estimate_view(request):
    serializer = EstimateRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    return _respond(*estimation_service.estimate(
        serializer.spec_object(), _config(data['init']), data['trials'], data['seed'], save=data['save'],
    ))


@extend_schema(
    request=ExactRequestSerializer,
    responses={200: {'description': 'Exact rho grid on the truncated chain.'}},
    tags=['Experiments']
)
@api_view(['POST'])
@authentication_classes([JWTAuthentication, SessionAuthentication])
@permission_classes([IsAuthenticated])
def exact_view(request):
    serializer = ExactRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    return _respond(*exact_service.solve(
        serializer.spec_object(), data['xmax'], with_mean_t=data['with_mean_t'],
        both_extinct_value=data['both_extinct_value'], save=data['save'],
    ))


@extend_schema(
    request=OdeRequestSerializer,
    responses={200: {'description': 'Deterministic trajectory sampled every dt.'}},
    tags=['Experiments']
)
@api_view(['POST'])
@authentication_classes([JWTAuthentication, SessionAuthentication])
@permission_classes([IsAuthenticated])
def ode_view(request):
    serializer = OdeRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    return _respond(*ode_service.trajectory(
        serializer.spec_object(), data['x0'], data['x1'], data['dt'], data['horizon'], save=data['save'],
    ))


@extend_schema(
    request=SimulateRequestSerializer,
    responses={200: {'description': 'Statistics of a single trajectory.'}},
    tags=['Experiments']
)
@api_view(['POST'])
@authentication_classes([JWTAuthentication, SessionAuthentication])
@permission_classes([IsAuthenticated])
def simulate_view(request):
    serializer = SimulateRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    return _respond(*simulation_service.simulate(
        serializer.spec_object(), _config(data['init']), data['seed'],
        gillespie=data['gillespie'], max_steps=data['max_steps'], save=data['save'],
    ))


@extend_schema(
    tags=['Runs'],
    summary='Stored experiment runs',
    description='Read-only access to runs saved by the API or the management commands'
)
class ExperimentRunViewSet(mixins.ListModelMixin,
                           mixins.RetrieveModelMixin,
                           viewsets.GenericViewSet):
    serializer_class = ExperimentRunSerializer
    permission_classes = [IsAuthenticated]
    authentication_classes = [JWTAuthentication, SessionAuthentication]
    lookup_field = 'run_id'

    @extend_schema(
        parameters=[
            OpenApiParameter(name='kind', description='Filter by run kind', required=False, type=OpenApiTypes.STR,
                             enum=[choice for choice, _ in RunKinds.CHOICES]),
        ],
        responses={200: ExperimentRunSerializer(many=True)},
        tags=['Runs'],
        summary='List runs',
    )
    def list(self, request, *args, **kwargs):
        return super().list(request, *args, **kwargs)

    @extend_schema(
        responses={200: ExperimentRunSerializer, 404: {'description': 'Run not found'}},
        tags=['Runs'],
        summary='Get run details',
    )
    def retrieve(self, request, *args, **kwargs):
        run = run_repo.get_by_run_id(kwargs.get('run_id'))
        if run is None:
            return Response({"error": "Run not found."}, status=status.HTTP_404_NOT_FOUND)
        return Response(self.get_serializer(run).data)

    def get_queryset(self):
        kind = self.request.query_params.get('kind')
        if kind:
            return run_repo.filter_by_kind(kind)
        return run_repo.get_all()
