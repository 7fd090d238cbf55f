from setuptools import setup, find_packages

setup(
    name="numa-sched",
    version="0.1.0",
    packages=find_packages(),
    include_package_data=True,
    install_requires=[
        "numpy>=1.17.0",
        "python-dotenv>=1.0.0",
        "click>=8.0.0",
        "reportlab>=3.0.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.0.0",
            "scipy>=1.4.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "numasched=numa_sched.cli:main",
        ],
    },
    description="NUMA-aware OS scheduling algorithms driven by per-thread DRAM access counters",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    keywords="numa, scheduling, hungarian, assignment, dram, simulation",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: System :: Operating System",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: MIT License",
    ],
    python_requires=">=3.8",
)
