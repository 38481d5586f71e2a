def get_derham_service(max_workers: int = None):
    from abkit.services.derham.derham_service import DerhamService
    return DerhamService(max_workers=max_workers)

def get_family_service(max_workers: int = None):
    from abkit.services.family.family_service import FamilyService
    return FamilyService(get_derham_service(max_workers))

def get_command_runner(max_workers: int = None):
    from abkit.services.runner.command_runner import CommandRunner
    family_service = get_family_service(max_workers)
    return CommandRunner(family_service.derham_service, family_service)
