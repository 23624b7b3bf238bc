from django.http import HttpResponseRedirect
from django.urls import reverse
from rest_framework_simplejwt.authentication import JWTAuthentication
from rest_framework_simplejwt.exceptions import InvalidToken, TokenError
from drf_spectacular.views import SpectacularAPIView, SpectacularSwaggerView, SpectacularRedocView


class JWTProtectedDocsMixin:
    """
    Lets a documentation view through for session users or a valid JWT
    (Authorization header or `access_token` cookie); everyone else is sent
    to the token endpoint.
    """

    def _user_from_token(self, token):
        try:
            jwt_auth = JWTAuthentication()
            validated_token = jwt_auth.get_validated_token(token)
            return jwt_auth.get_user(validated_token)
        except (InvalidToken, TokenError):
            return None

    def dispatch(self, request, *args, **kwargs):
        if request.user.is_authenticated:
            return super().dispatch(request, *args, **kwargs)

        token = None
        auth_header = request.META.get('HTTP_AUTHORIZATION', '')
        if auth_header.startswith('Bearer '):
            token = auth_header.split(' ')[1]
        else:
            token = request.COOKIES.get('access_token')

        if token:
            user = self._user_from_token(token)
            if user and user.is_authenticated:
                request.user = user
                return super().dispatch(request, *args, **kwargs)

        return HttpResponseRedirect(reverse('token_obtain_pair'))


class ProtectedSchemaView(JWTProtectedDocsMixin, SpectacularAPIView):
    """Protected API schema view that requires authentication."""


class ProtectedSwaggerView(JWTProtectedDocsMixin, SpectacularSwaggerView):
    """Protected Swagger UI view that requires authentication."""


class ProtectedRedocView(JWTProtectedDocsMixin, SpectacularRedocView):
    """Protected ReDoc view that requires authentication."""
