import hashlib
import json
import logging
import os
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import SupertauError, ValidationError
from supertau.models.frobenius_spec import FrobeniusSpec
from supertau.models.generators import jet
from supertau.models.virasoro_coefficients import VirasoroCoefficients

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(__file__))), 'data')

BUILTIN_SPECS = ('onedim', 'cp1')

REQUIRED_KEYS = ('n', 'd', 'potential', 'euler', 'mu')
KNOWN_KEYS = set(REQUIRED_KEYS) | {'name', 'R', 'field_names', 'h_table',
                                   'virasoro_coefficients', 'resonance', 'description'}


def read_document(path):
    """
    Read a spec document, skipping // comment lines.

    Args:
        path (str): Path to the JSON file

    Returns:
        dict: Parsed document
    """
    with open(path, 'r') as f:
        content = ""
        for line in f:
            if not line.strip().startswith('//'):
                content += line
    return json.loads(content)


def resolve_spec_path(name_or_path, data_dir=None):
    """Map a built-in spec name to its data file; paths pass through."""
    if name_or_path in BUILTIN_SPECS:
        return os.path.join(data_dir or DATA_DIR, f'{name_or_path}.json')
    return name_or_path


def canonical_json(document):
    return json.dumps(document, sort_keys=True, separators=(',', ':'))


def spec_hash(document):
    """SHA-256 of the canonical JSON form of a spec document."""
    return hashlib.sha256(canonical_json(document).encode('utf-8')).hexdigest()


def _fraction(value):
    return Fraction(str(value))


def parse_potential(rows, n):
    """Rows [coeff, exponent-vector, exp-vector] into a DiffPoly."""
    potential = DiffPoly.zero()
    for row in rows:
        coeff = _fraction(row[0])
        powers = row[1]
        exps = row[2] if len(row) > 2 else [0] * n
        even = [(jet(alpha), int(p)) for alpha, p in enumerate(powers, start=1) if int(p)]
        pairs = [(alpha, _fraction(q)) for alpha, q in enumerate(exps, start=1) if _fraction(q)]
        potential = potential + DiffPoly.monomial(coeff, even=even, exps=pairs)
    return potential


def validate_spec_document(document):
    """
    Validate the structure of a spec document before building tensors.

    Args:
        document (dict): The parsed spec document

    Returns:
        dict: Validation results with warnings and critical errors
    """
    results = {
        'warnings': [],
        'critical_errors': []
    }

    # Check if data is a dictionary
    if not isinstance(document, dict):
        results['critical_errors'].append("Spec document must be a dictionary")
        return results

    # Check for required fields
    for key in REQUIRED_KEYS:
        if key not in document:
            results['critical_errors'].append(f"Missing required field '{key}'")
    if results['critical_errors']:
        return results

    for key in document:
        if key not in KNOWN_KEYS:
            results['warnings'].append(f"Unknown field '{key}' ignored")

    n = document['n']
    if not isinstance(n, int) or n < 1:
        results['critical_errors'].append("Field 'n' must be a positive integer")
        return results

    # Vector lengths must match the dimension
    euler = document['euler']
    if not isinstance(euler, dict):
        results['critical_errors'].append("Field 'euler' must be a dictionary")
    else:
        for part in ('linear', 'constants'):
            if len(euler.get(part, [])) != n:
                results['critical_errors'].append(f"Euler '{part}' must have {n} entries")
    if len(document['mu']) != n:
        results['critical_errors'].append(f"Field 'mu' must have {n} entries")

    for i, row in enumerate(document['potential']):
        if not isinstance(row, list) or len(row) < 2 or len(row[1]) != n:
            results['critical_errors'].append(f"Potential term {i} must be [coeff, {n} exponents, exps?]")
        elif len(row) > 2 and len(row[2]) != n:
            results['critical_errors'].append(f"Potential term {i} exponential vector must have {n} entries")

    for k, matrix in enumerate(document.get('R', []), start=1):
        if len(matrix) != n or any(len(row) != n for row in matrix):
            results['critical_errors'].append(f"Matrix R_{k} must be {n}x{n}")

    for entry in document.get('resonance', []):
        if not isinstance(entry, list) or len(entry) != 2 or not all(isinstance(x, int) for x in entry):
            results['critical_errors'].append(f"Resonance entry {entry!r} must be [alpha, p]")

    if 'h_table' not in document:
        results['warnings'].append("No h_table supplied; densities will be solved")

    return results


def check_identities(spec):
    """
    Return the names of violated Frobenius identities.

    Args:
        spec (FrobeniusSpec): Spec with derived tensors

    Returns:
        list: (identity, message) pairs
    """
    problems = []
    fields = list(spec.fields)

    # eta constant and invertible (raises from the cached properties)
    for identity, attr in (('eta-constant', 'eta'), ('eta-invertible', 'eta_inv')):
        try:
            getattr(spec, attr)
        except ValidationError as e:
            problems.append((e.identity, str(e)))
            return problems

    if spec.mu_of(1) != -spec.d / 2:
        problems.append(('mu-charge', f"mu_1 = {spec.mu_of(1)} differs from -d/2 = {-spec.d / 2}"))

    for a in fields:
        for b in fields:
            if (spec.mu_of(a) + spec.mu_of(b)) * spec.eta_lo(a, b):
                problems.append(('mu-eta', f"(mu_{a} + mu_{b}) eta_{a}{b} != 0"))

    # WDVV associativity
    for a in fields:
        for b in fields:
            for g in fields:
                for lam in fields:
                    left = DiffPoly.zero()
                    right = DiffPoly.zero()
                    for e in fields:
                        left = left + spec.c_mixed[(e, a, b)] * spec.c_mixed[(lam, e, g)]
                        right = right + spec.c_mixed[(e, b, g)] * spec.c_mixed[(lam, e, a)]
                    if left != right:
                        problems.append(('wdvv', f"associativity fails at ({a},{b},{g};{lam})"))
                        return problems

    # quasi-homogeneity of the structure constants
    for g in fields:
        for a in fields:
            for b in fields:
                c = spec.c_mixed[(g, a, b)]
                weight = spec.mu_of(a) + spec.mu_of(b) - spec.mu_of(g) - spec.mu_of(1)
                if spec.apply_euler(c) != c.scale(weight):
                    problems.append(('c-hom', f"E(c^{g}_{a}{b}) has the wrong weight"))

    # d_gamma g^{ab} = Gamma^{ab}_gamma + Gamma^{ba}_gamma
    for a in fields:
        for b in fields:
            for g in fields:
                lhs = spec.g_upper[(a, b)].partial(jet(g))
                rhs = spec.gamma[(a, b, g)] + spec.gamma[(b, a, g)]
                if lhs != rhs:
                    problems.append(('g-gam', f"d_{g} g^{a}{b} != Gamma + Gamma"))

    for m, coeffs in sorted(spec.virasoro_tables.items()):
        for entry in coeffs.symmetry_violations():
            problems.append(('virasoro-symmetric', f"L_{m}: {entry} is not symmetric"))
    return problems


def build_spec(document, name=None, source=None):
    n = document['n']
    field_names = {int(k): v for k, v in (document.get('field_names') or {}).items()}
    h_table = {}
    for key, value in (document.get('h_table') or {}).items():
        alpha, p = (int(x) for x in key.split(','))
        h_table[(alpha, p)] = DiffPoly.from_json(value)
    virasoro = {}
    for key, value in (document.get('virasoro_coefficients') or {}).items():
        virasoro[int(key)] = VirasoroCoefficients.from_json(value)
    return FrobeniusSpec(
        name=name or document.get('name', 'spec'),
        n=n,
        d=_fraction(document['d']),
        potential=parse_potential(document['potential'], n),
        euler_linear=[_fraction(x) for x in document['euler']['linear']],
        euler_constants=[_fraction(x) for x in document['euler']['constants']],
        mu=[_fraction(x) for x in document['mu']],
        R=[[[_fraction(x) for x in row] for row in matrix] for matrix in document.get('R', [])],
        field_names=field_names,
        h_table=h_table,
        virasoro_tables=virasoro,
        resonance=document.get('resonance'),
        source=source,
    )


def load_spec(document_or_path, data_dir=None):
    """
    Load and validate a Frobenius manifold spec.

    Args:
        document_or_path: A parsed document, a JSON path or a built-in name

    Returns:
        FrobeniusSpec: The validated spec

    Raises:
        ValidationError: naming the first violated identity
    """
    source = None
    if isinstance(document_or_path, str):
        source = resolve_spec_path(document_or_path, data_dir)
        if not os.path.exists(source):
            raise ValidationError('document', f"Spec file not found: {source}")
        try:
            document = read_document(source)
        except json.JSONDecodeError as e:
            raise ValidationError('document', f"Spec file is not valid JSON: {e}")
    else:
        document = document_or_path

    results = validate_spec_document(document)
    for warning in results['warnings']:
        logger.warning(f"Spec warning: {warning}")
    if results['critical_errors']:
        raise ValidationError('document', "; ".join(results['critical_errors']))

    try:
        spec = build_spec(document, source=source)
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        raise ValidationError('document', f"Malformed spec entry: {e}")
    spec.hash = spec_hash(document)
    spec.warnings = list(results['warnings'])

    problems = check_identities(spec)
    if problems:
        identity, message = problems[0]
        raise ValidationError(identity, message)

    logger.info(f"Loaded spec {spec.name} (n={spec.n}, d={spec.d})")
    return spec


def try_load_spec(document_or_path, data_dir=None):
    """Validate without raising: returns (spec or None, results dict)."""
    results = {'warnings': [], 'critical_errors': []}
    try:
        spec = load_spec(document_or_path, data_dir)
    except SupertauError as e:
        results['critical_errors'].append(str(e))
        return None, results
    results['warnings'] = spec.warnings
    return spec, results
