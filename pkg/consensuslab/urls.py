"""
URL configuration for consensuslab project.

The `urlpatterns` list routes URLs to views. For more information please see:
    https://docs.djangoproject.com/en/5.2/topics/http/urls/
"""
from django.contrib import admin
from django.urls import path, include
from rest_framework_simplejwt.views import TokenObtainPairView, TokenRefreshView
from .views import ProtectedSchemaView, ProtectedSwaggerView, ProtectedRedocView

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/v1/', include('experiments.urls')),

    # Authentication
    path('api/v1/auth/token/', TokenObtainPairView.as_view(), name='token_obtain_pair'),
    path('api/v1/auth/token/refresh/', TokenRefreshView.as_view(), name='token_refresh'),

    # API Documentation (Protected with JWT authentication)
    path('api/schema/', ProtectedSchemaView.as_view(), name='schema'),
    path('api/docs/', ProtectedSwaggerView.as_view(url_name='schema'), name='swagger-ui'),
    path('api/redoc/', ProtectedRedocView.as_view(url_name='schema'), name='redoc'),
]
