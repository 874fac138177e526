"""Citation cascades in blog networks: extraction, shape census, statistics and an item-free null model."""

from .cascades import (Cascade, CascadeMetrics, assign_topic, cascade_depth, cascade_metrics, extract_all_cascades,
                       extract_cascade, find_origins, sc_coefficient, topic_unity)
from .ingest import (Citation, Corpus, CorpusSummary, IngestError, Post, TopicLabels, filter_corpus, load_corpus,
                     parse_citations, parse_posts, parse_topics)
from .motifs import ShapeCensus, ShapeCode, canonical_code, canonical_form, shape_census
from .nullmodel import (ComparisonReport, ModelAggregate, RewireConfig, compare, fit_theta, rewire_citations,
                        run_realizations)
from .stats import (EmpiricalDistribution, FitError, PowerLawFit, degree_distributions, fit_power_law,
                    latency_distribution, pearson, rank_correlation, weekday_activity)

__version__ = "0.1.0"
