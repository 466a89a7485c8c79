import setuptools

with open("README.rst", "r", encoding="utf-8") as f:
    readme = f.read()

with open('requirements.txt') as f:
    requirements = f.read().splitlines()

with open('requirements-dev.txt') as f:
    test_requirements = f.read().splitlines()

setuptools.setup(
    name="meanharmonic",
    version="0.1.0",
    author="VAWVAW",
    author_email="vawvaw@vaw-valentin.de",
    description="Strongly harmonic polynomials of norm-induced metrics with polynomial weights.",
    long_description=readme,
    long_description_content_type="text/x-rst",
    url="https://github.com/vawvaw/meanharmonic",
    project_urls={
        "Bug Tracker": "https://github.com/vawvaw/meanharmonic/issues",
    },
    license="GPLv3",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3.10",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Natural Language :: English",
        "Operating System :: OS Independent",
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules',
        "Typing :: Typed",
    ],
    packages=["meanharmonic"],
    install_requires=requirements,
    extras_require={"test": test_requirements},
    entry_points={"console_scripts": ["meanharmonic = meanharmonic.cli:main"]},
    python_requires=">=3.10",
)
