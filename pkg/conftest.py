import os

import django


os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'endgames.settings')
django.setup()
