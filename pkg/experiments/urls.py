from django.urls import include, path
from rest_framework.routers import DefaultRouter

from .views import ExperimentRunViewSet, estimate_view, exact_view, ode_view, simulate_view

app_name = 'experiments'

router = DefaultRouter()
router.register(r'runs', ExperimentRunViewSet, basename='run')

urlpatterns = [
    path('estimate/', estimate_view, name='estimate'),
    path('exact/', exact_view, name='exact'),
    path('ode/', ode_view, name='ode'),
    path('simulate/', simulate_view, name='simulate'),

    path('', include(router.urls)),
]
