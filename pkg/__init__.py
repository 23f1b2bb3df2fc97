"""Taelman class modules of Drinfeld modules, constant-field towers and Iwasawa length calculus."""

from config import Config
from base_algebra import FiniteField, Poly, parse_poly
from drinfeld_core import DrinfeldModule, StandardModules, certified_exp
from finite_module import FiniteAModule
from class_module import class_module_with_modulus, compute_class_module, galois_coinvariants
from unit_search import unit_group_search
from iwasawa_tower import TowerRunner, TowerSpec, asymptotic_fit, run_tower
from lambda_mu_engine import ElementaryModule, PresentationMatrix, SeriesT, presentation_lengths, verify_alg_T
from ramification_calc import BreakData, different_valuation, divergence_certificate
from report_io import ModuleSpecReader, ReportWriter
from utils import PathResolver, ResourceGuard

__version__ = "1.0.0"
__author__ = "Taelman Iwasawa Team"

__all__ = [
    'Config',
    'FiniteField',
    'Poly',
    'parse_poly',
    'DrinfeldModule',
    'StandardModules',
    'certified_exp',
    'FiniteAModule',
    'compute_class_module',
    'class_module_with_modulus',
    'galois_coinvariants',
    'unit_group_search',
    'TowerSpec',
    'TowerRunner',
    'run_tower',
    'asymptotic_fit',
    'SeriesT',
    'ElementaryModule',
    'PresentationMatrix',
    'presentation_lengths',
    'verify_alg_T',
    'BreakData',
    'different_valuation',
    'divergence_certificate',
    'ModuleSpecReader',
    'ReportWriter',
    'PathResolver',
    'ResourceGuard',
]
