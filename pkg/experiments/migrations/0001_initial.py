# Generated by Django 5.2.5

import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_id', models.UUIDField(default=uuid.uuid4, editable=False, unique=True)),
                ('kind', models.CharField(choices=[('estimate', 'Monte Carlo rho estimate'), ('sweep', 'Threshold sweep'), ('threshold', 'Threshold bisection'), ('exact', 'Exact rho grid'), ('ode', 'Deterministic ODE trajectory'), ('couple_check', 'Coupling check'), ('nice_chain', 'Nice chain statistics'), ('simulate', 'Single trajectory'), ('acceptance', 'Acceptance suite')], max_length=20)),
                ('spec', models.JSONField(blank=True, default=dict, help_text='Flat key-value model spec')),
                ('parameters', models.JSONField(blank=True, default=dict, help_text='Run parameters other than the spec')),
                ('seed', models.DecimalField(blank=True, decimal_places=0, help_text='Base seed (unsigned 64-bit)', max_digits=20, null=True)),
                ('result', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Experiment Run',
                'verbose_name_plural': 'Experiment Runs',
                'db_table': 'experiment_run',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['kind', 'created_at'], name='experiment__kind_4e8a1f_idx')],
            },
        ),
    ]
