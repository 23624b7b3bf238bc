from django.contrib import admin

from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('run_id', 'kind', 'seed', 'created_at')
    list_filter = ('kind', 'created_at')
    search_fields = ('run_id', 'kind')
    readonly_fields = ('run_id', 'created_at')
    ordering = ('-created_at',)

    fieldsets = (
        ('Run', {
            'fields': ('run_id', 'kind', 'seed', 'created_at')
        }),
        ('Input', {
            'fields': ('spec', 'parameters')
        }),
        ('Result', {
            'fields': ('result',),
            'classes': ('collapse',)
        }),
    )
